#include "laminaplan/cli.hpp"

#include <functional>
#include <optional>

#include <CLI11.hpp>

#include "laminaplan/error.hpp"
#include "laminaplan/io.hpp"
#include "laminaplan/json_io.hpp"
#include "laminaplan/spunet.hpp"

namespace laminaplan {

namespace {

using json::Json;

struct Globals {
    std::string config;
    double wmin = 0, wmax = 0, sigma = 0, tau = 0;
    std::vector<std::int64_t> dims;
    std::string mode;
    std::uint64_t seed = 0;
    CLI::Option *o_wmin, *o_wmax, *o_dims, *o_sigma, *o_tau, *o_mode, *o_seed;
};

PipelineConfig resolve_config(const Globals& g) {
    PipelineConfig c;
    if (!g.config.empty()) {
        try {
            c = json::config_from_json(json::read_file(g.config));
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), g.config + (e.context().empty() ? "" : "#" + e.context()));
        }
    }
    if (g.o_wmin->count()) c.w_min = g.wmin;
    if (g.o_wmax->count()) c.w_max = g.wmax;
    if (g.o_dims->count()) c.target_dims = {g.dims[0], g.dims[1], g.dims[2]};
    if (g.o_sigma->count()) c.sigma = g.sigma;
    if (g.o_tau->count()) c.tau_deg = g.tau;
    if (g.o_mode->count()) c.mode = plan_mode_from_string(g.mode);
    if (g.o_seed->count()) c.seed = g.seed;
    c.validate();
    return c;
}

/// Loads a JSON document and decodes it, attributing schema errors to the file.
template <typename T>
T load(const std::string& path, T (*decode)(const Json&)) {
    const Json j = json::read_file(path);
    try {
        return decode(j);
    } catch (const Error& e) {
        throw Error(e.code(), e.what(), path + (e.context().empty() ? "" : "#" + e.context()));
    }
}

void save(const std::string& path, const Json& j) { io::write_text_atomic(path, json::dump(j)); }

nn::SpuNetConfig arch_config(const std::string& arch) {
    if (arch == "default") return nn::SpuNetConfig::reference();
    if (arch == "smoke") return nn::SpuNetConfig::smoke();
    throw Error(ErrorCode::Usage, "unknown architecture \"" + arch + "\", expected default or smoke", "--arch");
}

void write_error(std::ostream& err, std::string_view code, const std::string& message, const std::string& path) {
    Json j = {{"error", {{"code", std::string(code)}, {"message", message}, {"path", path}}}};
    err << j.dump() << '\n';
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Laminectomy cutting-plane planning from vertebral landmarks", "laminaplan"};
    app.fallthrough();
    app.require_subcommand(1);

    Globals g;
    app.add_option("--config", g.config, "pipeline config JSON")->check(CLI::ExistingFile);
    g.o_wmin = app.add_option("--wmin", g.wmin, "window lower bound");
    g.o_wmax = app.add_option("--wmax", g.wmax, "window upper bound");
    g.o_dims = app.add_option("--dims", g.dims, "target dims Z Y X")->expected(3);
    g.o_sigma = app.add_option("--sigma", g.sigma, "heatmap sigma in voxels");
    g.o_tau = app.add_option("--tau", g.tau, "perpendicularity tolerance in degrees");
    g.o_mode = app.add_option("--mode", g.mode, "total or partial")->check(CLI::IsMember({"total", "partial"}));
    g.o_seed = app.add_option("--seed", g.seed, "random seed");

    std::string in, out_path, ref, landmarks, landmarks_out, truth, params, params_out, box, weights, frame_out,
        text_out, arch = "default";
    std::vector<std::string> inputs, preds, truths;
    double noise_hu = 0.0;
    int threads = 0;
    std::optional<float> constant;
    std::function<void(const PipelineConfig&)> action;

    auto* synth = app.add_subcommand("synth", "generate a phantom volume with exact landmarks");
    synth->add_option("--out", out_path, "RVOL output")->required();
    synth->add_option("--landmarks-out", landmarks_out, "landmark JSON output")->required();
    synth->add_option("--params", params, "phantom params JSON (default: sampled from --seed)");
    synth->add_option("--params-out", params_out, "write the params used");
    synth->add_option("--noise-hu", noise_hu, "additive Gaussian noise sigma");
    synth->callback([&] {
        action = [&](const PipelineConfig& c) {
            PhantomParams p = params.empty() ? sample_phantom_params(c.seed, c.target_dims)
                                             : load<PhantomParams>(params, json::phantom_params_from_json);
            const Phantom ph = generate_phantom(p);
            const Volume vol = noise_hu > 0.0 ? add_noise(ph.volume, noise_hu, c.seed) : ph.volume;
            io::write_rvol(out_path, vol);
            save(landmarks_out, json::to_json(ph.landmarks));
            if (!params_out.empty()) save(params_out, json::to_json(p));
        };
    });

    auto* window = app.add_subcommand("window", "clamp-and-ramp intensity window");
    window->add_option("--in", in)->required();
    window->add_option("--out", out_path)->required();
    window->callback([&] {
        action = [&](const PipelineConfig& c) { io::write_rvol(out_path, apply_window(io::read_rvol(in), c.w_min, c.w_max)); };
    });

    auto* crop_cmd = app.add_subcommand("crop", "cut a voxel box out of a volume");
    crop_cmd->add_option("--in", in)->required();
    crop_cmd->add_option("--out", out_path)->required();
    crop_cmd->add_option("--box", box, "JSON {\"lo\":[z,y,x],\"hi\":[z,y,x]}, inclusive")->required();
    crop_cmd->callback([&] {
        action = [&](const PipelineConfig&) {
            io::write_rvol(out_path, crop(io::read_rvol(in), load<BoundingBox>(box, json::box_from_json)));
        };
    });

    auto* resample_cmd = app.add_subcommand("resample", "trilinear resample to --dims");
    resample_cmd->add_option("--in", in)->required();
    resample_cmd->add_option("--out", out_path)->required();
    auto* lm_in = resample_cmd->add_option("--landmarks", landmarks, "landmarks to carry along");
    auto* lm_out = resample_cmd->add_option("--landmarks-out", landmarks_out);
    lm_in->needs(lm_out);
    lm_out->needs(lm_in);
    resample_cmd->callback([&] {
        action = [&](const PipelineConfig& c) {
            const Volume src = io::read_rvol(in);
            const Volume dst = resample(src, c.target_dims);
            std::optional<LandmarkSet> mapped;
            if (!landmarks.empty())
                mapped = map_landmarks(load<LandmarkSet>(landmarks, json::landmarks_from_json), src.geometry(), dst.geometry());
            io::write_rvol(out_path, dst);
            if (mapped) save(landmarks_out, json::to_json(*mapped));
        };
    });

    auto* heatmap = app.add_subcommand("heatmap", "Gaussian target heatmaps from known landmarks");
    heatmap->add_option("--ref", ref, "RVOL giving the grid")->required();
    heatmap->add_option("--landmarks", landmarks)->required();
    heatmap->add_option("--out", out_path, "RTEN output")->required();
    heatmap->callback([&] {
        action = [&](const PipelineConfig& c) {
            const Volume vol = io::read_rvol(ref);
            const LandmarkSet lm = load<LandmarkSet>(landmarks, json::landmarks_from_json);
            io::write_rten(out_path, to_raw_tensor(make_targets(vol.geometry(), lm, c.sigma)));
        };
    });

    auto* localize_cmd = app.add_subcommand("localize", "argmax landmarks from a heatmap stack");
    localize_cmd->add_option("--in", in, "RTEN heatmaps")->required();
    localize_cmd->add_option("--ref", ref, "RVOL giving the grid")->required();
    localize_cmd->add_option("--out", out_path, "landmark JSON output")->required();
    localize_cmd->callback([&] {
        action = [&](const PipelineConfig&) {
            const Volume vol = io::read_rvol(ref);
            const HeatmapStack h = from_raw_tensor(io::read_rten(in));
            std::vector<std::string> warnings;
            const LandmarkSet lm = localize_landmarks(h, vol.geometry(), &warnings);
            for (const auto& w : warnings) err << Json({{"warning", w}}).dump() << '\n';
            save(out_path, json::to_json(lm));
        };
    });

    auto* infer = app.add_subcommand("infer", "network forward pass producing heatmaps");
    infer->add_option("--in", in, "RVOL input at the network grid")->required();
    infer->add_option("--weights", weights, "SPUW weights")->required();
    infer->add_option("--out", out_path, "RTEN output")->required();
    infer->add_option("--arch", arch, "default or smoke");
    infer->add_option("--threads", threads, "worker threads, 0 = all");
    infer->callback([&] {
        action = [&](const PipelineConfig&) {
            const nn::SpuNetConfig cfg = arch_config(arch);
            const Volume vol = io::read_rvol(in);
            const nn::WeightStore w = nn::load_weights(io::read_file(weights), cfg);
            io::write_rten(out_path, to_raw_tensor(nn::forward(vol, w, cfg, {threads})));
        };
    });

    auto* plan = app.add_subcommand("plan", "cutting planes from landmarks");
    plan->add_option("--landmarks", landmarks)->required();
    plan->add_option("--out", out_path, "planes JSON output")->required();
    plan->add_option("--frame-out", frame_out, "frame JSON output");
    plan->callback([&] {
        action = [&](const PipelineConfig& c) {
            const LandmarkSet lm = load<LandmarkSet>(landmarks, json::landmarks_from_json);
            const std::vector<CutPlane> planes = plan_planes(lm, c.mode);
            const Frame f = fit_frame(lm);
            save(out_path, json::to_json(planes));
            if (!frame_out.empty()) save(frame_out, json::to_json(f));
        };
    });

    auto* grade = app.add_subcommand("grade", "grade planes against ground-truth landmarks");
    grade->add_option("--planes", in, "planes JSON")->required();
    grade->add_option("--truth", truth, "ground-truth landmark JSON")->required();
    grade->add_option("--out", out_path, "grades JSON output")->required();
    grade->callback([&] {
        action = [&](const PipelineConfig& c) {
            const auto planes = load<std::vector<CutPlane>>(in, json::planes_from_json);
            const LandmarkSet lm = load<LandmarkSet>(truth, json::landmarks_from_json);
            std::vector<GradeResult> grades;
            for (const CutPlane& p : planes) grades.push_back(grade_plane(p, lm, {c.tau_deg}));
            save(out_path, json::to_json(grades));
        };
    });

    auto* report = app.add_subcommand("report", "aggregate grade files into the results table");
    report->add_option("--in", inputs, "grades JSON files")->required();
    report->add_option("--out", out_path, "report JSON output")->required();
    report->add_option("--text-out", text_out, "plain-text table output");
    report->callback([&] {
        action = [&](const PipelineConfig&) {
            std::vector<GradeResult> all;
            for (const auto& path : inputs)
                for (auto& gr : load<std::vector<GradeResult>>(path, json::grades_from_json)) all.push_back(std::move(gr));
            const PlanReport r = aggregate(all);
            const std::string table = format_report_table(r);
            save(out_path, json::to_json(r));
            if (!text_out.empty()) io::write_text_atomic(text_out, table);
            out << table;
        };
    });

    auto* eval = app.add_subcommand("eval-landmarks", "localization error statistics");
    eval->add_option("--pred", preds, "predicted landmark JSON files")->required();
    eval->add_option("--truth", truths, "ground-truth landmark JSON files, same order")->required();
    eval->add_option("--out", out_path, "metrics JSON output")->required();
    eval->callback([&] {
        action = [&](const PipelineConfig&) {
            if (preds.size() != truths.size())
                throw Error(ErrorCode::Usage, "--pred and --truth need the same number of files", "--truth");
            std::vector<double> errors;
            std::vector<std::string> labels;
            for (std::size_t i = 0; i < preds.size(); ++i) {
                const LandmarkSet p = load<LandmarkSet>(preds[i], json::landmarks_from_json);
                const LandmarkSet t = load<LandmarkSet>(truths[i], json::landmarks_from_json);
                for (std::size_t k = 0; k < kLandmarkCount; ++k) {
                    errors.push_back(localization_error(p.points[k], t.points[k]));
                    const std::string name(kLandmarkNames[k]);
                    labels.push_back(preds.size() == 1 ? name : std::to_string(i) + "/" + name);
                }
            }
            save(out_path, json::metrics_to_json(labels, aggregate_errors(errors)));
        };
    });

    auto* manifest = app.add_subcommand("manifest", "print the network layer manifest");
    manifest->add_option("--arch", arch, "default or smoke");
    manifest->callback([&] {
        action = [&](const PipelineConfig&) { out << nn::format_manifest(arch_config(arch)); };
    });

    auto* init = app.add_subcommand("init-weights", "write a random or constant weight file");
    init->add_option("--out", out_path, "SPUW output")->required();
    init->add_option("--arch", arch, "default or smoke");
    init->add_option("--constant", constant, "all kernels zero and every bias this value");
    init->callback([&] {
        action = [&](const PipelineConfig& c) {
            const nn::SpuNetConfig cfg = arch_config(arch);
            const nn::WeightStore w = constant ? nn::constant_weights(cfg, *constant) : nn::random_weights(cfg, c.seed);
            io::write_file_atomic(out_path, nn::save_weights(w));
        };
    });

    std::vector<std::string> argv_store{"laminaplan"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        write_error(err, to_string(ErrorCode::Usage), e.what(), "");
        return kExitUsage;
    }

    try {
        action(resolve_config(g));
    } catch (const Error& e) {
        write_error(err, to_string(e.code()), e.what(), e.context());
        return e.code() == ErrorCode::Usage ? kExitUsage : kExitFailure;
    } catch (const std::exception& e) {
        write_error(err, "internal", e.what(), "");
        return kExitFailure;
    }
    return kExitOk;
}

} // namespace laminaplan
