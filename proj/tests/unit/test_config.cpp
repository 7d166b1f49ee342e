#include <doctest.h>

#include <filesystem>
#include <set>
#include <string>

#include "rexsim/config.hpp"

using namespace rexsim;
using namespace rexsim::config;

namespace {

ConfigError parse_error(std::string const& text)
{
    try
    {
        parse_config_text(text, "t.ini");
    }
    catch (ConfigError const& e)
    {
        return e;
    }
    FAIL("expected a ConfigError");
    return ConfigError(ErrorKind::syntax, "", 0, 0, "");
}

} // namespace

TEST_SUITE("config")
{
    TEST_CASE("key table is consistent")
    {
        std::set<std::string> seen;
        for (auto const& k : key_table())
        {
            auto const id = std::string(k.section) + "." + std::string(k.key);
            CHECK(seen.insert(id).second);
            CHECK_FALSE(k.description.empty());
            bool known = false;
            for (auto const& s : ConfigDocument::section_names())
                known = known || s == k.section;
            CHECK(known);
        }
        CHECK(seen.count("cavity.q_factor") == 1);
        CHECK(seen.count("field.b_field_mt") == 1);
    }

    TEST_CASE("shipped default config")
    {
        auto const path = std::filesystem::path(REXSIM_SOURCE_DIR) / "config" / "default.ini";
        auto const doc = parse_config(path);
        CHECK(doc == default_config());
        for (auto const& s : ConfigDocument::section_names())
            CHECK_FALSE(doc.entries(s).empty());
        CHECK(doc.number("cavity", "q_factor") == 3900);
        CHECK(doc.number("material", "wavelength_nm") == 880);
        CHECK(doc.text("material", "local_field_model") == "real");
        CHECK(doc.detection_stages().size() == 5);
    }

    TEST_CASE("values, units and comments")
    {
        auto const doc = parse_config_text("# header\n"
                                           "[cavity]\n"
                                           "q_factor = 7800   ; doubled\n"
                                           "mode_volume_um3 = 0.1 um^3\n"
                                           "[field]\n"
                                           "b_field_mt = 200 mT # lower field\n"
                                           "[detection]\n"
                                           "stage_lens = 0.5\n"
                                           "stage_detector = 0.9\n");
        CHECK(doc.number("cavity", "q_factor") == 7800);
        CHECK(doc.number("cavity", "mode_volume_um3") == 0.1);
        CHECK(doc.number("field", "b_field_mt") == 200);
        CHECK(doc.explicitly_set("cavity", "q_factor"));
        CHECK_FALSE(doc.explicitly_set("cavity", "t2_us"));
        CHECK(doc.number("cavity", "t2_us") == 25.4);
        auto const stages = doc.detection_stages();
        REQUIRE(stages.size() == 2);
        CHECK(stages[0].first == "lens");
        CHECK(stages[1].second == 0.9);
    }

    TEST_CASE("round trip through serialize")
    {
        auto const a = parse_config_text("[cavity]\nq_factor = 12345.678\n[simulation]\nseed = 99\n"
                                         "ramsey_envelope = gaussian\n[detection]\nstage_x = 0.3\n");
        auto const text = serialize(a);
        auto const b = parse_config_text(text);
        CHECK(a == b);
        CHECK(serialize(b) == text);
        CHECK(parse_config_text(serialize(default_config())) == default_config());

        auto const c = parse_config_text("[cavity]\nq_factor = 12345.679\n");
        CHECK_FALSE(a == c);
    }

    TEST_CASE("invalid value names the key")
    {
        auto const e = parse_error("[cavity]\nq_factor=-1\n");
        CHECK(e.kind() == ErrorKind::invalid_value);
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("q_factor") != std::string::npos);
        CHECK(std::string(e.what()).rfind("t.ini:2:", 0) == 0);
    }

    TEST_CASE("error kinds carry line and column")
    {
        auto e = parse_error("[cavity]\n  bogus_key = 3\n");
        CHECK(e.kind() == ErrorKind::unknown_key);
        CHECK(e.line() == 2);
        CHECK(e.column() == 3);

        e = parse_error("[cavity]\nq_factor = 3\nq_factor = 4\n");
        CHECK(e.kind() == ErrorKind::duplicate_key);
        CHECK(e.line() == 3);

        e = parse_error("[field]\nb_field_mt = 390 T\n");
        CHECK(e.kind() == ErrorKind::unit_mismatch);
        CHECK(e.line() == 2);
        CHECK(e.column() == 18);

        e = parse_error("[cavity]\nq_factor = abc\n");
        CHECK(e.kind() == ErrorKind::non_numeric);
        CHECK(e.column() == 12);

        e = parse_error("[nowhere]\n");
        CHECK(e.kind() == ErrorKind::unknown_section);
        CHECK(e.line() == 1);

        e = parse_error("q_factor = 3\n");
        CHECK(e.kind() == ErrorKind::syntax);

        e = parse_error("[cavity]\nq_factor 3\n");
        CHECK(e.kind() == ErrorKind::syntax);

        e = parse_error("[simulation]\npulses = 1.5\n");
        CHECK(e.kind() == ErrorKind::invalid_value);

        e = parse_error("[material]\nlocal_field_model = lorentz\n");
        CHECK(e.kind() == ErrorKind::invalid_value);

        e = parse_error("[cavity]\nstage_lens = 0.5\n");
        CHECK(e.kind() == ErrorKind::unknown_key);

        e = parse_error("[detection]\nstage_lens = 1.5\n");
        CHECK(e.kind() == ErrorKind::invalid_value);

        CHECK_THROWS_AS(parse_config("/nonexistent/rexsim.ini"), ConfigError);
        try
        {
            parse_config("/nonexistent/rexsim.ini");
        }
        catch (ConfigError const& err)
        {
            CHECK(err.kind() == ErrorKind::missing_file);
        }
    }

    TEST_CASE("messages are deterministic")
    {
        auto const a = parse_error("[cavity]\nq_factor = abc\n");
        auto const b = parse_error("[cavity]\nq_factor = abc\n");
        CHECK(std::string(a.what()) == std::string(b.what()));
    }
}
