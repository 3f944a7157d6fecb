// planesym command line: classify images or .hka sets, generate test patterns.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "planesym/hka.hpp"
#include "planesym/imageio.hpp"
#include "planesym/noisegen.hpp"
#include "planesym/parallel.hpp"
#include "planesym/pipeline.hpp"
#include "planesym/report.hpp"

namespace fs = std::filesystem;
using namespace planesym;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string selection = "square";
    int size = 1024;
    std::string center;
    std::optional<double> radius_cut;
    double min_amp = default_min_amp;
    std::string subset = "p2,p3,p6";
    std::string format = "csv";
    std::uint64_t seed = 0;
    std::string out;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<PlaneGroup> parse_groups(const std::string& s) {
    std::vector<PlaneGroup> out;
    for (const auto& t : split(s, ',')) out.push_back(parse_group(t));
    return out;
}

std::vector<double> parse_reals(const std::string& s, std::size_t n, const char* what) {
    std::vector<double> out;
    for (const auto& t : split(s, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != t.size()) throw InvalidArgumentError(std::string("malformed ") + what + ": " + s);
        out.push_back(v);
    }
    if (out.size() != n) throw InvalidArgumentError(std::string(what) + " needs " + std::to_string(n) + " values");
    return out;
}

void emit(const ClassificationReport& rep, const RunConfig& rc) {
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    std::ostringstream ss;
    if (rc.format == "json")
        write_report_json(ss, rep);
    else
        write_report_csv(ss, rep);
    if (rc.out.empty()) {
        std::cout << ss.str();
        return;
    }
    std::ofstream f(rc.out);
    if (!f) throw IoError("cannot write " + rc.out);
    f << ss.str();
}

int cmd_classify(const RunConfig& rc, const std::string& input, const std::string& hka_dir) {
    AnalysisConfig cfg;
    cfg.shape = rc.selection == "circle" ? SelectionShape::circle : SelectionShape::square;
    cfg.size = rc.size;
    if (!rc.center.empty()) {
        const auto c = parse_reals(rc.center, 2, "center");
        cfg.center = PixelCoord{static_cast<int>(c[0]), static_cast<int>(c[1])};
    }
    cfg.radius_cut = rc.radius_cut;
    cfg.min_amp = rc.min_amp;
    cfg.subset = parse_groups(rc.subset);
    const GrayImage img = load_image(input);
    const AnalysisResult r = analyze_image(img, cfg);
    std::cerr << "lattice: a=" << r.direct.a_len << " px, b=" << r.direct.b_len << " px, gamma=" << r.direct.gamma
              << " deg, " << r.fcs.size() << " coefficients\n";
    if (!hka_dir.empty()) {
        fs::create_directories(hka_dir);
        const std::string base = fs::path(input).stem().string();
        for (const auto& m : r.models) write_hka(fs::path(hka_dir) / hka_filename(base, m.group), to_hka_records(m));
    }
    emit(r.report, rc);
    return 0;
}

int cmd_classify_hka(const RunConfig& rc, const std::string& dir) {
    const auto files = find_hka_files(dir);
    std::vector<PlaneGroup> present;
    std::string missing;
    for (auto g : scored_groups) {
        if (files.count(g))
            present.push_back(g);
        else
            missing += (missing.empty() ? "" : ",") + std::string(name(g));
    }
    if (present.empty()) throw InvalidArgumentError("no per-group .hka files in " + dir);
    if (!missing.empty()) std::cerr << "warning: missing groups skipped: " << missing << '\n';
    std::vector<GroupModel> models(present.size());
    parallel_for(present.size(), [&](std::size_t i) {
        models[i] = model_from_hka(read_hka(files.at(present[i])), present[i]);
    });
    emit(classify(to_model_inputs(models), parse_groups(rc.subset)), rc);
    return 0;
}

MotifKind parse_motif(const std::string& s) {
    if (s == "random") return MotifKind::random;
    if (s == "pinwheel") return MotifKind::pinwheel;
    throw InvalidArgumentError("unknown motif '" + s + "' (random, pinwheel)");
}

std::string motif_name(MotifKind k) { return k == MotifKind::pinwheel ? "pinwheel" : "random"; }

json sidecar(const PatternSpec& s, const RenderResult& r) {
    const UnitCell c = resolved_cell(s);
    const auto rep = repeats_in(c, r.image.width(), r.image.height());
    return {{"group", name(s.group)},
            {"motif", motif_name(s.motif)},
            {"motif_seed", s.motif_seed},
            {"cell", {{"a", c.a}, {"b", c.b}, {"gamma", c.gamma}}},
            {"width", r.image.width()},
            {"height", r.image.height()},
            {"repeats", {{"nx", rep[0]}, {"ny", rep[1]}}},
            {"noise", {{"rgb_level", s.noise.rgb_level}, {"spread_distance", s.noise.spread_distance}, {"seed", s.noise.seed}}},
            {"overlap_fraction", r.overlap_fraction}};
}

void write_generated(const PatternSpec& s, const fs::path& png) {
    const RenderResult r = generate_pattern(s);
    if (r.overlap_fraction > 0.0)
        std::cerr << "warning: motif copies overlap on " << r.overlap_fraction * 100.0 << "% of pixels\n";
    if (png.has_parent_path()) fs::create_directories(png.parent_path());
    write_png16(png.string(), r.image);
    fs::path side = png;
    side.replace_extension(".json");
    std::ofstream f(side);
    if (!f) throw IoError("cannot write " + side.string());
    f << sidecar(s, r).dump(2) << '\n';
}

/// Applies the keys of one manifest entry on top of spec.
void apply_entry(PatternSpec& s, const json& e) {
    if (e.contains("group")) s.group = parse_group(e.at("group").get<std::string>());
    if (e.contains("motif")) s.motif = parse_motif(e.at("motif").get<std::string>());
    if (e.contains("cell")) {
        const auto& c = e.at("cell");
        s.cell = UnitCell{c.at("a").get<double>(), c.at("b").get<double>(), c.at("gamma").get<double>()};
    }
    if (e.contains("width")) s.width = e.at("width").get<int>();
    if (e.contains("height")) s.height = e.at("height").get<int>();
    if (e.contains("repeats")) s.repeats = Repeats{e.at("repeats").at("nx").get<int>(), e.at("repeats").at("ny").get<int>()};
    if (e.contains("motif_seed")) s.motif_seed = e.at("motif_seed").get<std::uint64_t>();
    if (e.contains("rgb_level")) s.noise.rgb_level = e.at("rgb_level").get<double>();
    if (e.contains("spread_distance")) s.noise.spread_distance = e.at("spread_distance").get<double>();
    if (e.contains("seed")) s.noise.seed = e.at("seed").get<std::uint64_t>();
}

int cmd_generate_manifest(const std::string& manifest, const std::string& out_dir) {
    std::ifstream f(manifest);
    if (!f) throw IoError("cannot open " + manifest);
    json m;
    try {
        m = json::parse(f);
    } catch (const json::exception& e) {
        throw InvalidArgumentError("malformed manifest " + manifest + ": " + e.what());
    }
    PatternSpec base;
    if (m.contains("defaults")) apply_entry(base, m.at("defaults"));
    const auto& images = m.at("images");
    std::vector<std::pair<PatternSpec, fs::path>> jobs;
    for (const auto& e : images) {
        PatternSpec s = base;
        apply_entry(s, e);
        jobs.emplace_back(s, fs::path(out_dir) / (e.at("name").get<std::string>() + ".png"));
    }
    fs::create_directories(out_dir);
    parallel_for(jobs.size(), [&](std::size_t i) { write_generated(jobs[i].first, jobs[i].second); });
    std::cerr << "wrote " << jobs.size() << " images to " << out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Plane symmetry group classification of periodic images"};
    app.require_subcommand(1);
    RunConfig rc;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--selection", rc.selection, "Selection shape")->check(CLI::IsMember({"square", "circle"}));
        sub->add_option("--size", rc.size, "Selection edge length in pixels (power of two)");
        sub->add_option("--center", rc.center, "Selection center x,y in pixels (default: image center)");
        sub->add_option("--radius-cut", rc.radius_cut, "Reciprocal-space radius in pixels (default: size/8)");
        sub->add_option("--min-amp", rc.min_amp, "Relative amplitude threshold");
        sub->add_option("--subset", rc.subset, "Comma-separated groups for subset weights");
        sub->add_option("--format", rc.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", rc.seed, "Random seed");
        sub->add_option("--out", rc.out, "Output file (default: stdout)");
    };

    std::string input, hka_dir;
    auto* classify_cmd = app.add_subcommand("classify", "Classify an image (PNG or TIFF)");
    classify_cmd->add_option("image", input, "Input image")->required();
    classify_cmd->add_option("--hka-dir", hka_dir, "Write <basename>_<group>.hka files here");
    add_common(classify_cmd);

    std::string dir;
    auto* hka_cmd = app.add_subcommand("classify-hka", "Classify a directory of per-group .hka files");
    hka_cmd->add_option("dir", dir, "Directory")->required();
    add_common(hka_cmd);

    PatternSpec spec;
    std::string group = "p2", motif = "random", cell, repeats, manifest;
    auto* gen_cmd = app.add_subcommand("generate", "Render a synthetic wallpaper pattern with noise");
    gen_cmd->add_option("--group", group, "Plane group");
    gen_cmd->add_option("--motif", motif, "Motif")->check(CLI::IsMember({"random", "pinwheel"}));
    gen_cmd->add_option("--cell", cell, "Cell a,b,gamma in pixels and degrees");
    gen_cmd->add_option("--width", spec.width, "Raster width");
    gen_cmd->add_option("--height", spec.height, "Raster height");
    gen_cmd->add_option("--repeats", repeats, "Cell repeats nx,ny (sets the raster size)");
    gen_cmd->add_option("--motif-seed", spec.motif_seed, "Seed of the random motif");
    gen_cmd->add_option("--rgb", spec.noise.rgb_level, "Gray-level noise level in [0,1]");
    gen_cmd->add_option("--spread", spec.noise.spread_distance, "Spread noise distance in pixels");
    gen_cmd->add_option("--seed", spec.noise.seed, "Noise seed");
    gen_cmd->add_option("--manifest", manifest, "JSON manifest of images; --out is then a directory");
    gen_cmd->add_option("--out", rc.out, "Output PNG (a JSON sidecar is written next to it)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*classify_cmd) return cmd_classify(rc, input, hka_dir);
        if (*hka_cmd) return cmd_classify_hka(rc, dir);
        if (!manifest.empty()) return cmd_generate_manifest(manifest, rc.out);
        spec.group = parse_group(group);
        spec.motif = parse_motif(motif);
        if (!cell.empty()) {
            const auto c = parse_reals(cell, 3, "cell");
            spec.cell = UnitCell{c[0], c[1], c[2]};
        }
        if (!repeats.empty()) {
            const auto r = parse_reals(repeats, 2, "repeats");
            spec.repeats = Repeats{static_cast<int>(r[0]), static_cast<int>(r[1])};
        }
        write_generated(spec, rc.out);
        return 0;
    } catch (const InsufficientPeriodicityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
