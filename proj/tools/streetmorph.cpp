// Command-line front end: scene generation, full pipeline runs and single
// stage runs for debugging. Exit codes: 0 success, 1 input error, 2 stage
// failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "streetmorph/pipeline.hpp"
#include "streetmorph/scene_gen.hpp"

namespace sm = streetmorph;

namespace {

struct CommonOpts {
    std::string config_path;
    double resolution = 0, lambda = 0, threshold = 0, h = 0, min_acc = 0;
    std::int64_t min_px = 0;
    int folds = 0;
    std::uint64_t seed = 0;
    bool no_blocks = false;
};

void add_common(CLI::App* sub, CommonOpts& o) {
    // free the short -h for the h-maxima flag
    sub->set_help_flag("--help", "print help");
    sub->add_option("--config", o.config_path, "flat key/value config file");
    sub->add_option("--resolution", o.resolution, "range image resolution, px/m");
    sub->add_option("--lambda", o.lambda, "quasi-flat-zone tolerance, m");
    sub->add_option("--threshold", o.threshold, "artifact height threshold, m");
    sub->add_option("--h", o.h, "h-maxima depth for separation, m");
    sub->add_option("--min-px", o.min_px, "minimum component size, px");
    sub->add_option("--min-acc", o.min_acc, "minimum component max accumulation");
    sub->add_option("--folds", o.folds, "cross-validation folds");
    sub->add_option("--seed", o.seed, "fold shuffling seed");
    sub->add_flag("--no-blocks", o.no_blocks, "treat the scene as a single block");
}

sm::PipelineConfig make_config(const CLI::App* sub, const CommonOpts& o) {
    sm::PipelineConfig cfg;
    if (!o.config_path.empty()) cfg = sm::load_pipeline_config_file(o.config_path);
    if (sub->count("--resolution")) cfg.resolution = o.resolution;
    if (sub->count("--lambda")) cfg.lambda = o.lambda;
    if (sub->count("--threshold")) cfg.threshold = o.threshold;
    if (sub->count("--h")) cfg.h = o.h;
    if (sub->count("--min-px")) cfg.min_px = o.min_px;
    if (sub->count("--min-acc")) cfg.min_acc = o.min_acc;
    if (sub->count("--folds")) cfg.folds = o.folds;
    if (sub->count("--seed")) cfg.seed = o.seed;
    if (o.no_blocks) cfg.use_blocks = false;
    return cfg;
}

int run_gen(const std::string& spec_path, const std::string& cloud_path,
            const std::string& truth_path) {
    std::ifstream in(spec_path);
    if (!in) throw sm::InputError("cannot read " + spec_path);
    sm::SceneSpec spec = sm::parse_scene_spec(in);
    sm::GeneratedScene scene = sm::generate_scene(spec);
    {
        std::ofstream out(cloud_path);
        if (!out) throw sm::Error("cannot write " + cloud_path);
        sm::write_cloud(scene.cloud, out);
    }
    if (!truth_path.empty()) {
        std::ofstream out(truth_path);
        if (!out) throw sm::Error("cannot write " + truth_path);
        sm::write_ground_truth_csv(scene, out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"street scene segmentation and artifact classification"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run the full pipeline");
    std::string run_input, run_out, run_labels, run_dump;
    CommonOpts run_opts;
    run->add_option("input", run_input, "input cloud (XYZ ASCII)")->required();
    run->add_option("-o,--out", run_out, "output directory")->required();
    run->add_option("--labels", run_labels, "training labels CSV (component_id,class)");
    run->add_option("--dump-stage", run_dump, "stage to emit extra debug rasters for");
    add_common(run, run_opts);

    auto* stage = app.add_subcommand("stage", "run one pipeline stage");
    std::string stage_name, stage_input, stage_out, stage_labels, stage_dump;
    CommonOpts stage_opts;
    stage->add_option("name", stage_name, "blocks|ground|detect|features|classify|label")
        ->required();
    stage->add_option("-o,--out", stage_out, "output directory")->required();
    stage->add_option("--input", stage_input, "input cloud (blocks stage)");
    stage->add_option("--labels", stage_labels, "training labels CSV (classify stage)");
    stage->add_option("--dump-stage", stage_dump, "stage to emit extra debug rasters for");
    add_common(stage, stage_opts);

    auto* gen = app.add_subcommand("gen", "generate a synthetic street scene");
    std::string gen_spec, gen_cloud = "scene.xyz", gen_truth;
    gen->add_option("spec", gen_spec, "scene description file")->required();
    gen->add_option("--cloud", gen_cloud, "output cloud path");
    gen->add_option("--truth", gen_truth, "optional ground-truth CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(run)) {
            sm::PipelineConfig cfg = make_config(run, run_opts);
            cfg.validate();
            sm::run_pipeline(cfg, run_input, run_labels, run_out, run_dump);
        } else if (app.got_subcommand(stage)) {
            sm::PipelineConfig cfg = make_config(stage, stage_opts);
            cfg.validate();
            std::filesystem::create_directories(stage_out);
            sm::run_stage(stage_name, cfg, stage_out, stage_input, stage_labels,
                          stage_dump == stage_name);
        } else if (app.got_subcommand(gen)) {
            return run_gen(gen_spec, gen_cloud, gen_truth);
        }
    } catch (const sm::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const sm::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
