#include "biofuse/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>

#include "biofuse/compat.hpp"
#include "biofuse/io.hpp"
#include "biofuse/matching.hpp"
#include "biofuse/protocol.hpp"
#include "biofuse/reduction.hpp"
#include "biofuse/synth.hpp"

namespace biofuse {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 42;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PipelineConfig load_config(const std::string& path) {
    return path.empty() ? PipelineConfig{} : PipelineConfig::load(path);
}

struct Options {
    // synth
    std::string outDir;
    int subjects = 50;
    int samples = 5;
    std::uint64_t seed = kDefaultSeed;
    std::string specFile;
    std::vector<std::string> params;
    // common
    std::string config;
    std::string in;
    std::string out;
    // attach-desc / deskew
    std::string templatePath;
    std::string image;
    std::string templateOut;
    std::optional<int> threshold;
    // fuse
    std::string face;
    std::string finger;
    // reduce
    std::string strategy;
    std::string stage;
    std::optional<double> radius;
    // match
    std::vector<std::string> pair;
    std::string matcher;
    // evaluate
    std::string manifest;
    bool noSessions = false;
};

void cmd_synth(const Options& o, std::ostream& out) {
    KeyValues kv;
    if (!o.specFile.empty()) kv = KeyValues::load(o.specFile);
    for (const auto& p : o.params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw UsageError("--param expects key=value, got '" + p + "'");
        kv.set(p.substr(0, eq), p.substr(eq + 1));
    }
    const PerturbationSpec known;
    const KeyValues names = known.to_key_values();
    for (const auto& [k, v] : kv.entries()) {
        if (!names.contains(k)) throw Error(ErrorCode::Config, "unknown perturbation parameter '" + k + "'");
    }
    const PerturbationSpec spec = PerturbationSpec::from_key_values(kv);
    const Manifest m = build_dataset(o.outDir, o.subjects, o.samples, o.seed, spec);
    out << "wrote " << m.sample_count() << " samples for " << m.subjects.size() << " subjects to "
        << (fs::path(o.outDir) / "manifest.txt").generic_string() << '\n';
}

void cmd_attach_desc(const Options& o, std::ostream& out) {
    const PipelineConfig cfg = load_config(o.config);
    const Template minutiae = load_template(o.templatePath, TemplateKind::Finger);
    const GrayImage image = load_image_pgm(o.image);
    const Template t = normalize_descriptors(make_compatible(minutiae, image, cfg.gabor), cfg.normalization);
    save_template(t, o.out);
    out << t.points.size() << '\n';
}

void cmd_deskew(const Options& o, std::ostream& out) {
    const PipelineConfig cfg = load_config(o.config);
    const GrayImage image = load_image_pgm(o.image);
    const DeskewResult d = deskew(image, o.threshold.value_or(cfg.deskewThreshold));
    save_image_pgm(d.rotated, o.out);
    if (!o.templatePath.empty()) {
        if (o.templateOut.empty()) throw UsageError("--template requires --template-out");
        save_template(apply_deskew(load_template(o.templatePath, TemplateKind::Finger), d), o.templateOut);
    }
    out << format_decimal(d.angle) << '\n';
}

void cmd_fuse(const Options& o, std::ostream& out) {
    const Template t = concatenate(load_template(o.face, TemplateKind::Face), load_template(o.finger, TemplateKind::Finger));
    save_template(t, o.out);
    out << t.points.size() << '\n';
}

void cmd_reduce(const Options& o, std::ostream& out) {
    const auto strategy = parse_reduction_strategy(o.strategy);
    if (!strategy) throw UsageError("--strategy must be one of none, kmeans, neighborhood, region");
    std::optional<ReductionStage> stage;
    if (!o.stage.empty()) {
        stage = parse_reduction_stage(o.stage);
        if (!stage) throw UsageError("--stage must be before or after");
    }
    if (*strategy == ReductionStrategy::KMeans && stage == ReductionStage::BeforeFusion) {
        throw UsageError("kmeans reduction runs on the fused pointset: use --stage after");
    }
    if ((*strategy == ReductionStrategy::Neighborhood || *strategy == ReductionStrategy::Region) &&
        stage == ReductionStage::AfterFusion) {
        throw UsageError(std::string(to_string(*strategy)) + " reduction runs per modality: use --stage before");
    }
    const PipelineConfig cfg = load_config(o.config);
    const Template t = load_template(o.in);
    Template r;
    switch (*strategy) {
        case ReductionStrategy::None:
            r = t;
            break;
        case ReductionStrategy::KMeans:
            r = kmeans_reduce(t, cfg.kmeans);
            break;
        case ReductionStrategy::Neighborhood:
            r = o.radius ? neighborhood_eliminate(t, *o.radius)
                         : neighborhood_eliminate(t, cfg.faceNeighborhood, cfg.fingerNeighborhood);
            break;
        case ReductionStrategy::Region:
            r = region_select(t, cfg.region);
            break;
    }
    save_template(r, o.out);
    out << r.points.size() << '\n';
}

void cmd_match(const Options& o, std::ostream& out) {
    PipelineConfig cfg = load_config(o.config);
    if (o.matcher == "point-pattern") {
        cfg.matcher.kind = MatcherKind::PointPattern;
    } else if (o.matcher == "delaunay") {
        cfg.matcher.kind = MatcherKind::Delaunay;
    } else if (!o.matcher.empty()) {
        throw UsageError("--matcher must be point-pattern or delaunay");
    }
    const Template a = load_template(o.pair[0]);
    const Template b = load_template(o.pair[1]);
    out << format_decimal(monomodal_match(a, b, cfg.matcher)) << '\n';
}

void cmd_evaluate(const Options& o, std::ostream& out) {
    const PipelineConfig cfg = load_config(o.config);
    const Manifest m = load_manifest(o.manifest);
    const auto data = prepare_dataset(m, cfg);
    ProtocolResult result = run_protocol(data, cfg);
    if (!o.noSessions) {
        ProtocolResult sessions = run_sessions(data, cfg);
        for (auto& r : sessions.reports) result.reports.push_back(std::move(r));
        for (auto& t : sessions.trials) result.trials.push_back(std::move(t));
    }
    const fs::path dir(o.out);
    write_reports(result, dir);
    write_file(dir / "retention.txt", format_retention(retention_counts(data.front().front(), cfg)));
    out << format_report(result.reports);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Feature-level fusion of face and fingerprint templates", "biofuse"};
    app.require_subcommand(1);
    Options o;

    auto* synth = app.add_subcommand("synth", "generate a synthetic chimeric dataset");
    synth->add_option("--out", o.outDir, "output directory")->required();
    synth->add_option("--subjects", o.subjects, "number of subjects")->check(CLI::Range(2, 100000));
    synth->add_option("--samples", o.samples, "samples per subject")->check(CLI::Range(2, 1000));
    synth->add_option("--seed", o.seed, "generator seed");
    synth->add_option("--spec", o.specFile, "perturbation parameters (key = value file)")->check(CLI::ExistingFile);
    synth->add_option("--param", o.params, "perturbation parameter override key=value");

    auto* attach = app.add_subcommand("attach-desc", "attach Gabor keydescriptors to minutiae");
    attach->add_option("--template", o.templatePath, "minutiae template")->required();
    attach->add_option("--image", o.image, "fingerprint image (PGM)")->required();
    attach->add_option("--out", o.out, "output template")->required();
    attach->add_option("--config", o.config, "pipeline configuration")->check(CLI::ExistingFile);

    auto* desk = app.add_subcommand("deskew", "remove the rotation of a fingerprint foreground");
    desk->add_option("--image", o.image, "fingerprint image (PGM)")->required();
    desk->add_option("--out", o.out, "output image (PGM)")->required();
    desk->add_option("--template", o.templatePath, "minutiae template to move along");
    desk->add_option("--template-out", o.templateOut, "output for the moved template");
    desk->add_option("--threshold", o.threshold, "foreground threshold")->check(CLI::Range(1, 255));
    desk->add_option("--config", o.config, "pipeline configuration")->check(CLI::ExistingFile);

    auto* fuse = app.add_subcommand("fuse", "concatenate a face and a finger template");
    fuse->add_option("--face", o.face, "face template")->required();
    fuse->add_option("--finger", o.finger, "compatible finger template")->required();
    fuse->add_option("--out", o.out, "output template")->required();

    auto* reduce = app.add_subcommand("reduce", "apply a feature reduction strategy");
    reduce->add_option("--in", o.in, "input template")->required();
    reduce->add_option("--out", o.out, "output template")->required();
    reduce->add_option("--strategy", o.strategy, "none | kmeans | neighborhood | region")->required();
    reduce->add_option("--stage", o.stage, "before | after (fusion)");
    reduce->add_option("--radius", o.radius, "single neighborhood radius for every point");
    reduce->add_option("--config", o.config, "pipeline configuration")->check(CLI::ExistingFile);

    auto* match = app.add_subcommand("match", "score two templates");
    match->add_option("templates", o.pair, "database and query templates")->required()->expected(2);
    match->add_option("--matcher", o.matcher, "point-pattern | delaunay");
    match->add_option("--config", o.config, "pipeline configuration")->check(CLI::ExistingFile);

    auto* evaluate = app.add_subcommand("evaluate", "run the verification protocol over a manifest");
    evaluate->add_option("--manifest", o.manifest, "dataset manifest")->required();
    evaluate->add_option("--config", o.config, "pipeline configuration")->check(CLI::ExistingFile);
    evaluate->add_option("--out", o.out, "report directory")->required();
    evaluate->add_flag("--no-sessions", o.noSessions, "only the configured pipeline");

    auto* version = app.add_subcommand("version", "print the version");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*synth) cmd_synth(o, out);
        if (*attach) cmd_attach_desc(o, out);
        if (*desk) cmd_deskew(o, out);
        if (*fuse) cmd_fuse(o, out);
        if (*reduce) cmd_reduce(o, out);
        if (*match) cmd_match(o, out);
        if (*evaluate) cmd_evaluate(o, out);
        if (*version) out << "biofuse " << kVersion << '\n';
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace biofuse
