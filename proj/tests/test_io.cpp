#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "biofuse/cli.hpp"
#include "biofuse/io.hpp"
#include "biofuse/protocol.hpp"
#include "biofuse/synth.hpp"
#include "support.hpp"

using namespace biofuse;
namespace fs = std::filesystem;

namespace {

Error error_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an error");
    return Error(ErrorCode::InvalidArgument, "");
}

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string descriptor_line(int values) {
    std::string line = "FACE 1 2 3";
    for (int i = 0; i < values; ++i) line += " 0.5";
    return line + "\n";
}

}  // namespace

TEST_CASE("number formatting round-trips") {
    biofuse::Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, static_cast<double>(rng.below(20)) - 10.0);
        CHECK(parse_number(format_number(v), "test") == v);
    }
    CHECK(format_decimal(1.0) == "1.0");
    CHECK(format_decimal(0.25) == "0.25");
    CHECK(error_of([] { parse_number("1.5x", "test"); }).code() == ErrorCode::Parse);
}

TEST_CASE("template text round-trip is lossless") {
    biofuse::Rng rng(2);
    for (const TemplateKind kind : {TemplateKind::Face, TemplateKind::Finger, TemplateKind::Fused}) {
        Template t = testsupport::random_template(rng, 12, 400.0, kind, kind != TemplateKind::Finger);
        if (kind == TemplateKind::Fused) t.points[3].modality = Modality::Finger;
        t.dpi = 500;
        t.referencePoint = Point2{rng.uniform(0, 400), rng.uniform(0, 400)};
        t.landmarks[Landmark::Mouth] = {1.0 / 3.0, 2.0 / 7.0};
        const Template back = parse_template(serialize_template(t));
        CHECK(back == t);
    }
    const fs::path dir = testsupport::scratch_dir("io_roundtrip");
    Template t = testsupport::random_template(rng, 5, 100.0);
    save_template(t, dir / "a.tpl");
    CHECK(load_template(dir / "a.tpl") == t);
    fs::remove_all(dir);
}

TEST_CASE("template parse errors name the line") {
    const std::string text = "kind FACE\n" + descriptor_line(128) + descriptor_line(127);
    const Error e = error_of([&] { parse_template(text, std::nullopt, "x.tpl"); });
    CHECK(e.code() == ErrorCode::Format);
    CHECK(std::string(e.what()).find("x.tpl:3") != std::string::npos);

    const Error p = error_of([] { parse_template("kind FACE\nFACE 1 two 3\n"); });
    CHECK(p.code() == ErrorCode::Parse);
    CHECK(std::string(p.what()).find(":2") != std::string::npos);
}

TEST_CASE("empty template file takes the declared kind") {
    const Template t = parse_template("", TemplateKind::Finger);
    CHECK(t.kind == TemplateKind::Finger);
    CHECK(t.points.empty());
    const Template c = parse_template("# nothing here\n\n", TemplateKind::Face);
    CHECK(c.points.empty());
}

TEST_CASE("PGM decoding") {
    const std::string bytes = std::string("P5\n2 2\n255\n") + std::string("\x00\x55\xaa\xff", 4);
    const GrayImage img = decode_pgm(bytes);
    CHECK(img.width == 2);
    CHECK(img.height == 2);
    CHECK(img.pixels == std::vector<std::uint8_t>{0, 85, 170, 255});
    CHECK(decode_pgm(encode_pgm(img)) == img);
    CHECK(decode_pgm("P5\n# comment\n2 2\n255\n" + std::string("\x00\x55\xaa\xff", 4)) == img);

    CHECK(error_of([] { decode_pgm("P2\n2 2\n255\n0 85 170 255\n"); }).code() == ErrorCode::UnsupportedFormat);
    CHECK(error_of([] { decode_pgm("P5\n2 2\n65535\n" + std::string(8, '\0')); }).code() ==
          ErrorCode::UnsupportedFormat);
    CHECK(error_of([] { decode_pgm(std::string("P5\n2 2\n255\n") + std::string("\x00\x55\xaa", 3)); }).code() ==
          ErrorCode::Parse);
}

TEST_CASE("key-value configuration") {
    const KeyValues kv = KeyValues::parse("# comment\nmatcher.kind = delaunay\nreduction.strategy = region\n");
    CHECK(kv.get("matcher.kind") == "delaunay");
    const PipelineConfig c = PipelineConfig::from_key_values(kv);
    CHECK(c.matcher.kind == MatcherKind::Delaunay);
    CHECK(c.reduction == ReductionStrategy::Region);

    const PipelineConfig round = PipelineConfig::from_key_values(PipelineConfig{}.to_key_values());
    CHECK(round.to_key_values().entries() == PipelineConfig{}.to_key_values().entries());

    CHECK(error_of([] { PipelineConfig::from_key_values(KeyValues::parse("no.such.key = 1\n")); }).code() ==
          ErrorCode::Config);
    CHECK(error_of([] { KeyValues::parse("missing equals sign\n"); }).code() == ErrorCode::Config);
}

TEST_CASE("manifest round-trip and validation") {
    const fs::path dir = testsupport::scratch_dir("io_manifest");
    const Manifest m = build_dataset(dir, 2, 2, 3, PerturbationSpec{});
    const Manifest loaded = load_manifest(dir / "manifest.txt");
    CHECK(loaded.subjects.size() == 2);
    CHECK(loaded.sample_count() == 4);
    CHECK(serialize_manifest(loaded) == serialize_manifest(m));

    fs::remove(dir / m.subjects[1].samples[0].face);
    CHECK(error_of([&] { load_manifest(dir / "manifest.txt"); }).code() == ErrorCode::Manifest);
    fs::remove_all(dir);
}

TEST_CASE("cli match prints the self score") {
    const fs::path dir = testsupport::scratch_dir("io_cli_match");
    biofuse::Rng rng(4);
    save_template(testsupport::random_template(rng, 20, 300.0), dir / "a.tpl");
    const CliRun r = cli({"match", (dir / "a.tpl").string(), (dir / "a.tpl").string()});
    CHECK(r.code == 0);
    CHECK(r.out == "1.0\n");
    const CliRun d = cli({"match", "--matcher", "delaunay", (dir / "a.tpl").string(), (dir / "a.tpl").string()});
    CHECK(d.code == 0);
    CHECK(d.out == "1.0\n");
    fs::remove_all(dir);
}

TEST_CASE("cli usage and domain errors") {
    const fs::path dir = testsupport::scratch_dir("io_cli_errors");
    biofuse::Rng rng(5);
    save_template(testsupport::random_template(rng, 20, 300.0, TemplateKind::Fused), dir / "f.tpl");
    const CliRun bad = cli({"reduce", "--in", (dir / "f.tpl").string(), "--out", (dir / "o.tpl").string(),
                            "--strategy", "kmeans", "--stage", "before"});
    CHECK(bad.code == 2);
    CHECK_FALSE(fs::exists(dir / "o.tpl"));
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"match", "--bogus", "x", "y"}).code == 2);
    CHECK(cli({}).code == 2);
    // missing input file is a domain error
    CHECK(cli({"match", (dir / "none.tpl").string(), (dir / "f.tpl").string()}).code == 1);

    const CliRun ok = cli({"reduce", "--in", (dir / "f.tpl").string(), "--out", (dir / "o.tpl").string(),
                           "--strategy", "kmeans"});
    CHECK(ok.code == 0);
    CHECK(load_template(dir / "o.tpl").points.size() < 20);
    fs::remove_all(dir);
}

TEST_CASE("cli version") {
    const CliRun r = cli({"version"});
    CHECK(r.code == 0);
    CHECK(r.out.find(kVersion) != std::string::npos);
}

TEST_CASE("cli synth and evaluate produce reports") {
    const fs::path dir = testsupport::scratch_dir("io_cli_eval");
    REQUIRE(cli({"synth", "--out", (dir / "data").string(), "--subjects", "3", "--samples", "2", "--seed", "5"}).code == 0);
    const CliRun r = cli({"evaluate", "--manifest", (dir / "data" / "manifest.txt").string(), "--out",
                          (dir / "report").string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "report" / "report.txt"));
    CHECK(fs::exists(dir / "report" / "trials.txt"));
    CHECK(fs::exists(dir / "report" / "retention.txt"));
    const std::string report = read_file(dir / "report" / "report.txt");
    CHECK(report.find("B_feature_fusion_kmeans_pp") != std::string::npos);
    CHECK(report.find("D_feature_fusion_region_dt") != std::string::npos);
    fs::remove_all(dir);
}
