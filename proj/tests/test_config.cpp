// test_config.cpp — Strict configuration parsing, presets, CSV formatting

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "qam/config.hpp"
#include "qam/csv.hpp"
#include "qam_presets.hpp"

using namespace qam;

namespace {

const char* kMinimal = R"({
  "schema_version": 1,
  "machine": {"type": "three_qubit", "omega_c": 0.5, "omega_h": 1.5, "g": 0.02},
  "baths": [
    {"label": "c", "T": 1.0},
    {"label": "h", "T": 1.1, "omega_ref": 1.0},
    {"label": "w", "T": 1.5, "kappa": 0.002, "D": 3}
  ],
  "dissipation": {"model": "local"},
  "run": {"mode": "steady"}
})";

std::string pointer_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.pointer();
    }
    return "<no error>";
}

std::string with(const std::string& from, const std::string& to) {
    std::string s = kMinimal;
    const auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return s.replace(pos, from.size(), to);
}

} // namespace

TEST(ParseConfig, Minimal) {
    const RunConfig c = parse_config(std::string(kMinimal));
    EXPECT_EQ(c.machine.type, MachineType::three_qubit);
    EXPECT_EQ(c.baths.size(), 3u);
    EXPECT_EQ(c.bath('w').dimensionality, 3);
    EXPECT_FALSE(c.bath('c').omega_ref.has_value());
    EXPECT_EQ(c.bath('c').spec(1.5).omega_ref, 1.5);
    EXPECT_EQ(c.bath('h').spec(1.5).omega_ref, 1.0);
    EXPECT_EQ(c.seed, 1u);
}

TEST(ParseConfig, RoundTrip) {
    const RunConfig a = parse_config(std::string(kMinimal));
    const std::string text = serialize_config(a);
    const RunConfig b = parse_config(text);
    EXPECT_EQ(a, b);
    EXPECT_EQ(serialize_config(b), text);
    EXPECT_EQ(config_hash(a), config_hash(b));
}

TEST(ParseConfig, HashTracksContent) {
    const RunConfig a = parse_config(std::string(kMinimal));
    RunConfig b = a;
    b.seed = 2;
    EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(ParseConfig, MissingLabelNamesPointer) {
    EXPECT_EQ(pointer_of(with(R"({"label": "h", "T": 1.1, "omega_ref": 1.0})", R"({"T": 1.1})")), "/baths/1/label");
}

TEST(ParseConfig, UnknownKeyRejected) {
    EXPECT_EQ(pointer_of(with(R"("g": 0.02})", R"("g": 0.02, "gee": 1})")), "/machine/gee");
    EXPECT_EQ(pointer_of(with(R"("mode": "steady")", R"("mode": "steady", "extra": [])")), "/run/extra");
}

TEST(ParseConfig, ValueErrors) {
    EXPECT_EQ(pointer_of(with(R"("T": 1.0})", R"("T": -1.0})")), "/baths/0/T");
    EXPECT_EQ(pointer_of(with(R"("omega_h": 1.5)", R"("omega_h": 0.4)")), "/machine/omega_h");
    EXPECT_EQ(pointer_of(with(R"("model": "local")", R"("model": "semi")")), "/dissipation/model");
    EXPECT_EQ(pointer_of(with(R"("schema_version": 1)", R"("schema_version": 2)")), "/schema_version");
    EXPECT_EQ(pointer_of(with(R"("label": "c")", R"("label": "w")")), "/baths/2/label");
    EXPECT_EQ(pointer_of(with(R"("omega_c": 0.5)", R"("omega_c": "0.5")")), "/machine/omega_c");
}

TEST(ParseConfig, ModeRequirements) {
    EXPECT_EQ(pointer_of(with(R"("mode": "steady")", R"("mode": "sweep")")), "/run/sweep");
    EXPECT_EQ(pointer_of(with(R"("mode": "steady")", R"("mode": "transient")")), "/run/time");
    EXPECT_EQ(pointer_of(with(R"("mode": "steady")",
                              R"("mode": "sweep", "sweep": {"start": 0.1, "stop": 1.0, "count": 0})")),
              "/run/sweep/count");
}

TEST(ParseConfig, MalformedJson) {
    try {
        parse_config(std::string("{\n  \"schema_version\": 1,\n  oops\n}"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Presets, AllParseAndRoundTrip) {
    ASSERT_EQ(std::size(presets::kAll), 7u);
    for (const auto& [name, text] : presets::kAll) {
        SCOPED_TRACE(std::string(name));
        const RunConfig c = parse_config(std::string(text));
        EXPECT_EQ(parse_config(serialize_config(c)), c);
    }
}

TEST(Presets, FridgeCaptionTemperatures) {
    for (const char* name : {"fig5-local", "fig5-global", "fig7"}) {
        const RunConfig c = parse_config(std::string(presets::find(name)));
        EXPECT_EQ(c.bath('c').temperature, 1.0);
        EXPECT_EQ(c.bath('h').temperature, 1.1);
        EXPECT_EQ(c.bath('w').temperature, 1.5);
    }
    const RunConfig e = parse_config(std::string(presets::find("fig9")));
    EXPECT_EQ(e.bath('c').temperature, 1.0);
    EXPECT_EQ(e.bath('h').temperature, 10.0);
    EXPECT_EQ(e.machine.omega_h, 1.0);
    EXPECT_TRUE(presets::find("nope").empty());
}

TEST(Grids, SweepAndTime) {
    SweepConfig s;
    s.start = 0.1;
    s.stop = 0.5;
    s.count = 5;
    const auto g = s.grid();
    ASSERT_EQ(g.size(), 5u);
    EXPECT_DOUBLE_EQ(g.front(), 0.1);
    EXPECT_DOUBLE_EQ(g.back(), 0.5);
    TimeGridConfig t{10.0, 4};
    EXPECT_EQ(t.grid(), (std::vector<double>{0.0, 2.5, 5.0, 7.5, 10.0}));
}

TEST(Csv, ShortestRoundTrip) {
    for (double x : {0.1, 1.0 / 3.0, 2.6666666666666665, 1e-300, -7.25, 12345678.9}) {
        const std::string s = format_double(x);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        EXPECT_EQ(back, x) << s;
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Csv, HeaderAndRows) {
    CsvTable t;
    t.columns = {"a", "b", "c"};
    t.rows.push_back({0.5, long{3}, std::string("+inf")});
    std::ostringstream out;
    write_csv(out, t, 0xabcULL, 42);
    EXPECT_EQ(out.str(), "# config_hash=0000000000000abc seed=42\na,b,c\n0.5,3,+inf\n");
    EXPECT_EQ(t.number(0, "b"), 3.0);
    EXPECT_TRUE(std::isnan(t.number(0, "c")));
    EXPECT_THROW(t.column("d"), std::out_of_range);
}
