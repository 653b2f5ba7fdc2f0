#ifndef STREETMORPH_PIPELINE_HPP
#define STREETMORPH_PIPELINE_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "blocks.hpp"
#include "classify.hpp"
#include "cloud_io.hpp"
#include "detect.hpp"
#include "features.hpp"
#include "ground.hpp"
#include "morphology.hpp"
#include "pgm.hpp"
#include "raster.hpp"
#include "selection.hpp"

namespace streetmorph {

/// Unreadable or malformed user input (exit code 1 territory), as opposed to a
/// failure inside a pipeline stage (exit code 2).
class InputError : public Error {
  public:
    explicit InputError(const std::string& what) : Error(what) {}
};

struct PipelineConfig {
    double resolution = 20.0;     // px/m of the fine range image
    int divisor = 4;              // block stage runs on resolution/divisor
    double lambda = 1.0;          // quasi-flat-zone tolerance, meters
    double threshold = 0.10;      // artifact height threshold, meters
    double h = 0.10;              // h-maxima depth for separation, meters
    std::int64_t area_px = 25;    // area opening before separation
    std::int64_t min_px = 10;     // minimum component size in pixels
    double min_acc = 3.0;         // minimum of the component's max accumulation
    double p_cutoff = 0.01;       // stepwise selection stopping p-value
    int folds = 10;               // cross-validation folds
    std::uint64_t seed = 42;      // fold shuffling seed
    double band_halfwidth = 2.0;  // profile band around the facade line, meters
    int window = 11;              // profile median smoothing window, samples
    double min_depth = 3.0;       // minimum profile dip depth for a cut, meters
    bool use_blocks = true;

    Connectivity link_se = Connectivity::Square8;
    Connectivity zone_se = Connectivity::Cross4;
    Connectivity detect_se = Connectivity::Square8;

    void validate() const {
        if (resolution <= 0 || lambda <= 0 || threshold <= 0 || h <= 0 || band_halfwidth <= 0 ||
            min_depth <= 0)
            throw Error("config: length parameters must be positive");
        if (divisor < 1) throw Error("config: divisor must be >= 1");
        if (folds < 2) throw Error("config: folds must be >= 2");
        if (window < 1 || window % 2 == 0) throw Error("config: window must be odd and >= 1");
        if (area_px < 1 || min_px < 1) throw Error("config: pixel thresholds must be >= 1");
    }
};

/// Flat `key value` config text; `#` starts a comment.
inline PipelineConfig load_pipeline_config(std::istream& in) {
    PipelineConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        double v;
        if (!(ls >> v)) throw ParseError("config line " + std::to_string(lineno) + ": missing value");
        if (key == "resolution") cfg.resolution = v;
        else if (key == "divisor") cfg.divisor = static_cast<int>(v);
        else if (key == "lambda") cfg.lambda = v;
        else if (key == "threshold") cfg.threshold = v;
        else if (key == "h") cfg.h = v;
        else if (key == "area_px") cfg.area_px = static_cast<std::int64_t>(v);
        else if (key == "min_px") cfg.min_px = static_cast<std::int64_t>(v);
        else if (key == "min_acc") cfg.min_acc = v;
        else if (key == "p_cutoff") cfg.p_cutoff = v;
        else if (key == "folds") cfg.folds = static_cast<int>(v);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(v);
        else if (key == "band_halfwidth") cfg.band_halfwidth = v;
        else if (key == "window") cfg.window = static_cast<int>(v);
        else if (key == "min_depth") cfg.min_depth = v;
        else if (key == "blocks") cfg.use_blocks = v != 0;
        else throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return cfg;
}

inline PipelineConfig load_pipeline_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    return load_pipeline_config(in);
}

namespace pipeline_detail {

inline std::string block_tag(std::size_t b) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "block_%02zu", b);
    return buf;
}

inline std::string path_join(const std::string& dir, const std::string& name) {
    return dir + "/" + name;
}

inline std::size_t read_block_count(const std::string& out_dir) {
    std::ifstream in(path_join(out_dir, "blocks.txt"));
    if (!in) throw InputError("cannot read " + path_join(out_dir, "blocks.txt"));
    long n;
    if (!(in >> n) || n < 1) throw ParseError("malformed blocks.txt");
    return static_cast<std::size_t>(n);
}

inline PointCloud read_block_cloud(const std::string& out_dir, std::size_t b) {
    return parse_cloud_file(path_join(out_dir, block_tag(b) + ".xyz"));
}

/// Valid-but-zero pixels quantize to the invalid PGM code; the label image
/// knows the true domain, so restore them at height 0.
inline Raster read_masked_raster(const std::string& pgm_path, const LabelImage& domain) {
    Raster r = read_raster_pgm(pgm_path);
    if (r.width() != domain.width || r.height() != domain.height)
        throw DimensionMismatch("raster and label image dimensions differ: " + pgm_path);
    for (std::size_t k = 0; k < r.valid.size(); ++k) {
        if (domain.labels[k] != 0 && !r.valid[k]) {
            r.valid[k] = 1;
            r.values[k] = 0.0;
        }
    }
    return r;
}

inline GroundMask read_ground_mask(const std::string& out_dir, std::size_t b, CameraFrame* frame) {
    const std::string tag = block_tag(b);
    LabelImage ml = read_labels_pgm(path_join(out_dir, tag + "_mask.pgm"), frame);
    GroundMask gm;
    gm.filled = read_masked_raster(path_join(out_dir, tag + "_filled.pgm"), ml);
    gm.mask.assign(ml.labels.size(), 0);
    for (std::size_t k = 0; k < ml.labels.size(); ++k) gm.mask[k] = ml.labels[k] == 1;
    return gm;
}

/// Component count of a block, taken from its dense component labeling.
inline std::int32_t component_count(const LabelImage& components) {
    std::int32_t n = 0;
    for (auto l : components.labels) n = std::max(n, l);
    return n;
}

}  // namespace pipeline_detail

/// Splits the input cloud into blocks along the dominant facade line and
/// writes one XYZ file plus one original-point-index file per block.
inline void stage_blocks(const PipelineConfig& cfg, const std::string& input,
                         const std::string& out_dir) {
    std::ifstream in(input);
    if (!in) throw InputError("cannot read " + input);
    PointCloud cloud;
    try {
        cloud = parse_cloud(in);
    } catch (const ParseError& e) {
        throw InputError(input + ": " + e.what());
    }

    std::vector<std::size_t> assign(cloud.size(), 0);
    if (cfg.use_blocks) {
        Projection proj = project(cloud, fit_frame(cloud, cfg.resolution));
        Raster coarse = downsample(proj.range, cfg.divisor, DownsampleMode::Max);
        FacadeLine line = detect_facade_line(coarse);
        // a zero-score line means the scene has no elevation at all, so
        // there is no facade direction to cut along
        if (line.score > 0.0) {
            HeightProfile prof =
                smooth_profile(extract_profile(coarse, line, cfg.band_halfwidth), cfg.window);
            std::vector<BlockCut> cuts = cut_profile(prof, cfg.min_depth);
            assign = block_assignment(cloud, line, cuts);
        }
    }

    // drop empty blocks so every block file projects to a nonempty raster
    std::size_t raw_blocks = 0;
    for (std::size_t a : assign) raw_blocks = std::max(raw_blocks, a + 1);
    std::vector<std::size_t> counts(raw_blocks, 0);
    for (std::size_t a : assign) ++counts[a];
    std::vector<std::size_t> dense(raw_blocks, 0);
    std::size_t nblocks = 0;
    for (std::size_t b = 0; b < raw_blocks; ++b)
        if (counts[b] > 0) dense[b] = nblocks++;

    std::vector<PointCloud> blocks(nblocks);
    std::vector<std::vector<std::size_t>> indices(nblocks);
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        std::size_t b = dense[assign[k]];
        blocks[b].points.push_back(cloud.points[k]);
        indices[b].push_back(k);
    }

    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::string tag = pipeline_detail::block_tag(b);
        std::ofstream xyz(pipeline_detail::path_join(out_dir, tag + ".xyz"));
        if (!xyz) throw Error("cannot write block file " + tag);
        write_cloud(blocks[b], xyz);
        std::ofstream idx(pipeline_detail::path_join(out_dir, tag + ".idx"));
        for (std::size_t k : indices[b]) idx << k << "\n";
        if (!idx) throw Error("cannot write index file " + tag);
    }
    std::ofstream meta(pipeline_detail::path_join(out_dir, "blocks.txt"));
    meta << nblocks << "\n";
    if (!meta) throw Error("cannot write blocks.txt");
}

/// Projects each block, completes the ground surface and segments it; writes
/// range, accumulation and filled rasters plus the ground/facade label image.
inline void stage_ground(const PipelineConfig& cfg, const std::string& out_dir) {
    std::size_t nblocks = pipeline_detail::read_block_count(out_dir);
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::string tag = pipeline_detail::block_tag(b);
        PointCloud cloud = pipeline_detail::read_block_cloud(out_dir, b);
        Projection proj = project(cloud, fit_frame(cloud, cfg.resolution));
        write_raster_pgm(proj.range, pipeline_detail::path_join(out_dir, tag + "_range.pgm"));
        write_raster_pgm(proj.accumulation, pipeline_detail::path_join(out_dir, tag + "_acc.pgm"));

        Raster linked = link_regions(proj.range, cfg.link_se);
        Raster filled = fill_gaps(linked, cfg.link_se);
        GroundMask gm = segment_ground(filled, cfg.lambda, cfg.zone_se);
        write_raster_pgm(gm.filled, pipeline_detail::path_join(out_dir, tag + "_filled.pgm"));
        write_labels_pgm(facade_ground_labels(gm), gm.filled.frame,
                         pipeline_detail::path_join(out_dir, tag + "_mask.pgm"));
    }
}

/// Detects ground-level artifacts on each block's ground mask, separates
/// merged ones and drops tiny components; writes the height raster and the
/// component label image.
inline void stage_detect(const PipelineConfig& cfg, const std::string& out_dir,
                         bool dump = false) {
    std::size_t nblocks = pipeline_detail::read_block_count(out_dir);
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::string tag = pipeline_detail::block_tag(b);
        CameraFrame frame;
        GroundMask gm = pipeline_detail::read_ground_mask(out_dir, b, &frame);
        if (dump) {
            double maxv = 0.0;
            bool any = false;
            for (std::size_t k = 0; k < gm.mask.size(); ++k) {
                if (!gm.mask[k]) continue;
                maxv = any ? std::max(maxv, gm.filled.values[k]) : gm.filled.values[k];
                any = true;
            }
            Raster inv(gm.filled.frame);
            for (std::size_t k = 0; k < gm.mask.size(); ++k) {
                if (!gm.mask[k]) continue;
                inv.valid[k] = 1;
                inv.values[k] = maxv - gm.filled.values[k];
            }
            write_raster_pgm(inv, pipeline_detail::path_join(out_dir, tag + "_inverted.pgm"));
        }
        ArtifactMap map = detect_artifacts(gm, cfg.threshold, cfg.detect_se);
        map = separate_components(map, cfg.area_px, cfg.h, cfg.detect_se);
        Raster acc = read_raster_pgm(pipeline_detail::path_join(out_dir, tag + "_acc.pgm"));
        if (acc.width() != map.heights.width() || acc.height() != map.heights.height())
            throw DimensionMismatch("accumulation and mask dimensions differ for " + tag);
        map = filter_small(map, acc, cfg.min_px, cfg.min_acc);
        write_raster_pgm(map.heights, pipeline_detail::path_join(out_dir, tag + "_fth.pgm"));
        write_labels_pgm(map.components, map.heights.frame,
                         pipeline_detail::path_join(out_dir, tag + "_components.pgm"));
    }
}

/// Computes per-component feature vectors across all blocks; component ids are
/// global (block-major, dense).
inline void stage_features(const PipelineConfig&, const std::string& out_dir) {
    std::size_t nblocks = pipeline_detail::read_block_count(out_dir);
    std::vector<std::pair<std::int32_t, FeatureVector>> rows;
    std::int32_t offset = 0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::string tag = pipeline_detail::block_tag(b);
        LabelImage comp = read_labels_pgm(pipeline_detail::path_join(out_dir, tag + "_components.pgm"));
        Raster heights = read_raster_pgm(pipeline_detail::path_join(out_dir, tag + "_fth.pgm"));
        Raster acc = read_raster_pgm(pipeline_detail::path_join(out_dir, tag + "_acc.pgm"));
        for (auto& [local, fv] : extract_component_features(comp, heights, acc))
            rows.push_back({offset + local, fv});
        offset += pipeline_detail::component_count(comp);
    }
    std::ofstream out(pipeline_detail::path_join(out_dir, "features.csv"));
    write_features_csv(rows, {}, out);
    if (!out) throw Error("cannot write features.csv");
}

namespace pipeline_detail {

struct FeatureTable {
    std::vector<std::int32_t> ids;
    Eigen::MatrixXd X;  // one row per component, FeatureVector::kCount columns
};

inline FeatureTable read_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    FeatureTable t;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty features file: " + path);
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() < 1 + FeatureVector::kCount)
            throw ParseError(path + " line " + std::to_string(lineno) + ": too few columns");
        t.ids.push_back(static_cast<std::int32_t>(row[0]));
        rows.push_back(row);
    }
    t.X.resize(static_cast<Eigen::Index>(rows.size()), FeatureVector::kCount);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < FeatureVector::kCount; ++c)
            t.X(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c) + 1];
    return t;
}

inline std::map<std::int32_t, ArtifactClass> read_component_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::map<std::int32_t, ArtifactClass> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw InputError(path + " line " + std::to_string(lineno) + ": expected id,class");
        std::string id_str = line.substr(0, comma);
        std::string cls = line.substr(comma + 1);
        while (!cls.empty() && (cls.back() == '\r' || cls.back() == ' ')) cls.pop_back();
        if (lineno == 1 && id_str == "component_id") continue;
        try {
            out[static_cast<std::int32_t>(std::stol(id_str))] = parse_artifact_class(cls);
        } catch (const std::exception& e) {
            throw InputError(path + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace pipeline_detail

/// Selects features by stepwise Wilks' Lambda, cross-validates the linear
/// discriminant classifier and writes the trace, model summary and confusion
/// matrix. Feature rows without a label are ignored.
inline void stage_classify(const PipelineConfig& cfg, const std::string& out_dir,
                           const std::string& labels_path) {
    auto table = pipeline_detail::read_features_csv(
        pipeline_detail::path_join(out_dir, "features.csv"));
    auto gt = pipeline_detail::read_component_labels(labels_path);

    std::vector<Eigen::Index> keep;
    std::vector<ArtifactClass> cls;
    for (std::size_t r = 0; r < table.ids.size(); ++r) {
        auto it = gt.find(table.ids[r]);
        if (it == gt.end()) continue;
        keep.push_back(static_cast<Eigen::Index>(r));
        cls.push_back(it->second);
    }
    if (keep.empty()) throw Error("classify: no labeled components");

    // compact class ids in Car/Lamppost/Pedestrian/Rest order
    std::vector<int> remap(kClassCount, -1);
    std::vector<std::string> class_names;
    for (int c = 0; c < kClassCount; ++c) {
        for (ArtifactClass a : cls) {
            if (static_cast<int>(a) == c) {
                remap[c] = static_cast<int>(class_names.size());
                class_names.push_back(to_string(static_cast<ArtifactClass>(c)));
                break;
            }
        }
    }
    Eigen::MatrixXd X(keep.size(), FeatureVector::kCount);
    std::vector<int> y(keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        X.row(static_cast<Eigen::Index>(r)) = table.X.row(keep[r]);
        y[r] = remap[static_cast<int>(cls[r])];
    }

    std::vector<std::string> feature_names(FeatureVector::names().begin(),
                                           FeatureVector::names().end());
    SelectionTrace trace = stepwise_select(X, y, cfg.p_cutoff, feature_names);
    {
        std::ofstream out(pipeline_detail::path_join(out_dir, "selection_trace.csv"));
        write_selection_trace_csv(trace, out);
        if (!out) throw Error("cannot write selection_trace.csv");
    }
    std::vector<int> cols = trace.selected;
    bool fallback_all = cols.empty();
    if (fallback_all)
        for (int c = 0; c < FeatureVector::kCount; ++c) cols.push_back(c);
    Eigen::MatrixXd Xsel(X.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) Xsel.col(static_cast<Eigen::Index>(c)) = X.col(cols[c]);

    ConfusionMatrix cm = cross_validate(Xsel, y, cfg.folds, cfg.seed, class_names);
    {
        std::ofstream out(pipeline_detail::path_join(out_dir, "confusion.csv"));
        write_confusion_csv(cm, out);
        if (!out) throw Error("cannot write confusion.csv");
    }
    {
        std::ofstream out(pipeline_detail::path_join(out_dir, "confusion.txt"));
        write_confusion_text(cm, out);
        if (!out) throw Error("cannot write confusion.txt");
    }
    {
        std::ofstream out(pipeline_detail::path_join(out_dir, "model_summary.txt"));
        out << "samples: " << keep.size() << "\n";
        std::vector<std::size_t> counts(class_names.size(), 0);
        for (int l : y) ++counts[static_cast<std::size_t>(l)];
        for (std::size_t c = 0; c < class_names.size(); ++c)
            out << "class " << class_names[c] << ": " << counts[c] << "\n";
        out << "selected features:";
        if (fallback_all) out << " (none accepted, using all)";
        for (int c : cols) out << ' ' << feature_names[static_cast<std::size_t>(c)];
        out << "\n";
        for (const auto& note : trace.notes) out << "note: " << note << "\n";
        out << "cv folds: " << cfg.folds << "\nseed: " << cfg.seed << "\n";
        out << std::fixed << std::setprecision(2) << "total error: " << cm.total_error << "%\n";
        if (!out) throw Error("cannot write model_summary.txt");
    }
}

/// Back-projects the per-block region labels onto the points and writes the
/// labeled cloud in the original point order. Artifact ids are global.
inline void stage_label(const PipelineConfig&, const std::string& out_dir) {
    std::size_t nblocks = pipeline_detail::read_block_count(out_dir);
    std::vector<Point3> points;
    std::vector<SegmentLabel> labels;
    std::vector<std::size_t> order;
    std::int32_t offset = 0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::string tag = pipeline_detail::block_tag(b);
        PointCloud cloud = pipeline_detail::read_block_cloud(out_dir, b);
        CameraFrame frame;
        LabelImage mask = read_labels_pgm(pipeline_detail::path_join(out_dir, tag + "_mask.pgm"), &frame);
        LabelImage comp = read_labels_pgm(pipeline_detail::path_join(out_dir, tag + "_components.pgm"));
        if (comp.width != mask.width || comp.height != mask.height)
            throw DimensionMismatch("mask and components dimensions differ for " + tag);

        // one merged image: 0 none, 1 ground, 2 facade, 3+ artifact id + 2
        LabelImage merged = mask;
        for (std::size_t k = 0; k < merged.labels.size(); ++k)
            if (comp.labels[k] > 0) merged.labels[k] = comp.labels[k] + offset + 2;
        offset += pipeline_detail::component_count(comp);

        PointCloud labeled = back_project(cloud, merged, frame,
            [](std::int32_t v) -> std::optional<SegmentLabel> {
                if (v <= 0) return std::nullopt;
                if (v == 1) return SegmentLabel::ground();
                if (v == 2) return SegmentLabel::facade();
                return SegmentLabel::artifact(static_cast<std::uint32_t>(v - 2));
            });

        std::ifstream idx(pipeline_detail::path_join(out_dir, tag + ".idx"));
        if (!idx) throw InputError("cannot read index file for " + tag);
        std::size_t orig;
        std::size_t row = 0;
        while (idx >> orig) {
            if (row >= cloud.size()) throw ParseError("index file longer than cloud for " + tag);
            points.push_back(labeled.points[row]);
            labels.push_back((*labeled.labels)[row]);
            order.push_back(orig);
            ++row;
        }
        if (row != cloud.size()) throw ParseError("index file shorter than cloud for " + tag);
    }

    PointCloud out;
    out.points.resize(points.size());
    out.labels.emplace(points.size(), SegmentLabel::unassigned());
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (order[k] >= points.size()) throw ParseError("point index out of range");
        out.points[order[k]] = points[k];
        (*out.labels)[order[k]] = labels[k];
    }
    std::ofstream f(pipeline_detail::path_join(out_dir, "labeled_cloud.xyz"));
    write_labeled_cloud(out, f);
    if (!f) throw Error("cannot write labeled_cloud.xyz");
}

/// Runs one named stage; any failure leaves a FAILED sentinel naming the stage.
inline void run_stage(const std::string& name, const PipelineConfig& cfg,
                      const std::string& out_dir, const std::string& input = "",
                      const std::string& labels = "", bool dump = false) {
    auto sentinel = [&](const std::string& cause) {
        std::ofstream f(pipeline_detail::path_join(out_dir, "FAILED"));
        f << name << ": " << cause << "\n";
    };
    try {
        cfg.validate();
        if (name == "blocks") stage_blocks(cfg, input, out_dir);
        else if (name == "ground") stage_ground(cfg, out_dir);
        else if (name == "detect") stage_detect(cfg, out_dir, dump);
        else if (name == "features") stage_features(cfg, out_dir);
        else if (name == "classify") stage_classify(cfg, out_dir, labels);
        else if (name == "label") stage_label(cfg, out_dir);
        else throw Error("unknown stage '" + name + "'");
    } catch (const InputError& e) {
        sentinel(e.what());
        throw;
    } catch (const std::exception& e) {
        sentinel(e.what());
        throw Error("stage " + name + " failed: " + e.what());
    }
}

inline std::vector<std::string> pipeline_stages(bool with_classify) {
    std::vector<std::string> s = {"blocks", "ground", "detect", "features"};
    if (with_classify) s.push_back("classify");
    s.push_back("label");
    return s;
}

/// Full pipeline: literally the composition of run_stage calls, so the
/// per-stage file contracts are the only coupling between stages.
inline void run_pipeline(const PipelineConfig& cfg, const std::string& input,
                         const std::string& labels, const std::string& out_dir,
                         const std::string& dump_stage = "") {
    std::filesystem::create_directories(out_dir);
    std::filesystem::remove(pipeline_detail::path_join(out_dir, "FAILED"));
    auto stages = pipeline_stages(!labels.empty());
    if (!dump_stage.empty()) {
        bool known = false;
        for (const auto& s : stages) known = known || s == dump_stage;
        if (!known) throw InputError("unknown stage '" + dump_stage + "'");
    }
    for (const auto& s : stages) run_stage(s, cfg, out_dir, input, labels, s == dump_stage);
}

}  // namespace streetmorph

#endif
