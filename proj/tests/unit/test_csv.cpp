#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "rexsim/csv.hpp"
#include "rexsim/errors.hpp"
#include "rexsim/numeric_format.hpp"

using namespace rexsim;

TEST_SUITE("csv")
{
    TEST_CASE("shortest round-trip numbers")
    {
        CHECK(format_double(0.1) == "0.1");
        CHECK(format_double(250e-9) == "2.5e-07");
        CHECK(format_double(28500000.0) == "28500000");
        CHECK(format_double(-0.0) == "-0");

        std::mt19937_64 gen(1);
        std::uniform_real_distribution<double> mant(-1.0, 1.0);
        std::uniform_int_distribution<int> ex(-300, 300);
        for (int i = 0; i < 20000; ++i)
        {
            double const v = mant(gen) * std::pow(10.0, ex(gen));
            auto const s = format_double(v);
            auto const back = parse_double(s);
            REQUIRE(back.has_value());
            CHECK(*back == v);
        }
        CHECK_FALSE(parse_double("1.5x").has_value());
        CHECK_FALSE(parse_double("").has_value());
        CHECK(parse_double("1e3") == 1000.0);
    }

    TEST_CASE("trace round trip")
    {
        TimeTrace t;
        t.x = {"t", "s", {0.0, 1e-6, 2e-6}};
        t.y = {"signal", "1", {0.5, 0.25, 1.0 / 3.0}};
        t.extra.push_back({"std_error", "1", {0.01, 0.02, 0.03}});
        t.add_meta("beat_hz", 740e3);

        std::stringstream ss;
        write_trace_csv(ss, t, {"ramsey", {{"window_us", "20"}}, 7, true});
        auto const text = ss.str();
        CHECK(text.rfind("# tool: ", 0) == 0);
        CHECK(text.find("# subcommand: ramsey") != std::string::npos);
        CHECK(text.find("# seed: 7") != std::string::npos);
        CHECK(text.find("# param.window_us: 20") != std::string::npos);
        CHECK(text.find("t[s],signal[1],std_error[1]\n") != std::string::npos);

        auto const back = read_trace_csv(ss);
        CHECK(back.x.name == "t");
        CHECK(back.x.unit == "s");
        CHECK(back.x.values == t.x.values);
        CHECK(back.y.values == t.y.values);
        REQUIRE(back.extra.size() == 1);
        CHECK(back.extra[0].values == t.extra[0].values);
        bool found = false;
        for (auto const& [k, v] : back.metadata)
            found = found || (k == "beat_hz" && v == "740000");
        CHECK(found);
    }

    TEST_CASE("payload ignores the header block")
    {
        TimeTrace t;
        t.x = {"x", "", {1, 2}};
        t.y = {"y", "", {3, 4}};
        std::stringstream a, b;
        write_trace_csv(a, t, {"g2", {}, 1, true});
        write_trace_csv(b, t, {"g2", {}, 1, false});
        CHECK(a.str() != b.str());
        CHECK(csv_payload(a.str()) == csv_payload(b.str()));
        CHECK(csv_payload(a.str()) == "x,y\n1,3\n2,4\n");
    }

    TEST_CASE("reader errors")
    {
        std::istringstream one("# only\nx\n1\n");
        CHECK_THROWS_AS(read_trace_csv(one), ValidationError);
        std::istringstream bad("x,y\n1,abc\n");
        CHECK_THROWS_AS(read_trace_csv(bad), ValidationError);
        std::istringstream ragged("x,y\n1,2\n3\n");
        CHECK_THROWS_AS(read_trace_csv(ragged), ValidationError);
    }

    TEST_CASE("writer rejects invalid traces")
    {
        TimeTrace t;
        t.x = {"x", "", {1, 1}};
        t.y = {"y", "", {3, 4}};
        std::ostringstream os;
        CHECK_THROWS(write_trace_csv(os, t, {"x", {}, {}, false}));
        t.x.values = {1, 2};
        t.y.values = {3, std::numeric_limits<double>::infinity()};
        CHECK_THROWS(write_trace_csv(os, t, {"x", {}, {}, false}));
    }
}
