#include "lanemark/detect.hpp"

#include "lanemark/errors.hpp"
#include "lanemark/raster.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace lanemark::detect {

ArrowTemplate rotate_template(const ArrowTemplate& t, int quarter_turns_cw) {
    const int q = ((quarter_turns_cw % 4) + 4) % 4;
    if (q == 0) return t;
    ArrowTemplate out;
    out.label = t.label;
    if (q == 2) {
        out.width = t.width;
        out.height = t.height;
        out.ink.resize(t.ink.size());
        for (int y = 0; y < t.height; ++y)
            for (int x = 0; x < t.width; ++x)
                out.ink[static_cast<std::size_t>(t.height - 1 - y) * t.width + (t.width - 1 - x)] =
                    t.at(x, y);
        return out;
    }
    out.width = t.height;
    out.height = t.width;
    out.ink.resize(t.ink.size());
    for (int y = 0; y < t.height; ++y) {
        for (int x = 0; x < t.width; ++x) {
            // One clockwise quarter turn: (x, y) -> (H-1-y, x).
            const int nx = t.height - 1 - y;
            const int ny = x;
            if (q == 1)
                out.ink[static_cast<std::size_t>(ny) * out.width + nx] = t.at(x, y);
            else // q == 3, counter-clockwise
                out.ink[static_cast<std::size_t>(out.height - 1 - ny) * out.width +
                        (out.width - 1 - nx)] = t.at(x, y);
        }
    }
    return out;
}

ArrowTemplate mirror_template(const ArrowTemplate& t) {
    ArrowTemplate out = t;
    for (int y = 0; y < t.height; ++y)
        for (int x = 0; x < t.width; ++x)
            out.ink[static_cast<std::size_t>(y) * t.width + (t.width - 1 - x)] =
                t.at(x, y);
    return out;
}

namespace {

// Vertical shaft with a left-pointing head near the top. The head placement
// breaks both mirror and 180-degree symmetry, so rotations of the left
// stencil never coincide with the right stencil.
ArrowTemplate make_left_arrow(int width, int height, int shaft_x0, int shaft_x1, int shaft_y0,
                              int head_tip_x, int head_mid_y, int head_half_max) {
    ArrowTemplate t;
    t.label = LaneLabel::left_only;
    t.width = width;
    t.height = height;
    t.ink.assign(static_cast<std::size_t>(width) * height, 0);
    auto set = [&](int x, int y) {
        if (x >= 0 && x < width && y >= 0 && y < height)
            t.ink[static_cast<std::size_t>(y) * width + x] = 1;
    };
    for (int y = shaft_y0; y < height; ++y)
        for (int x = shaft_x0; x < shaft_x1; ++x) set(x, y);
    const int run = shaft_x0 - head_tip_x;
    for (int x = head_tip_x; x < shaft_x0; ++x) {
        const int half = (x - head_tip_x) * head_half_max / std::max(run, 1);
        for (int y = head_mid_y - half; y <= head_mid_y + half; ++y) set(x, y);
    }
    return t;
}

} // namespace

std::vector<ArrowTemplate> builtin_templates(Schema) {
    // Full-size turn arrow, 13 x 22 ft at 0.5 ft/px.
    ArrowTemplate left = make_left_arrow(26, 44, 14, 22, 8, 2, 10, 8);
    ArrowTemplate right = mirror_template(left);
    right.label = LaneLabel::right_only;

    // Two-way-left-turn stencil: two opposing smaller left arrows. The
    // smaller component scale keeps single-arrow templates from matching
    // inside it.
    ArrowTemplate small = make_left_arrow(16, 28, 9, 14, 5, 1, 7, 5);
    ArrowTemplate small_flipped = rotate_template(small, 2);
    ArrowTemplate center;
    center.label = LaneLabel::center;
    center.width = 38;
    center.height = 32;
    center.ink.assign(static_cast<std::size_t>(center.width) * center.height, 0);
    auto blit = [&](const ArrowTemplate& src, int ox, int oy) {
        for (int y = 0; y < src.height; ++y)
            for (int x = 0; x < src.width; ++x)
                if (src.at(x, y))
                    center.ink[static_cast<std::size_t>(oy + y) * center.width + (ox + x)] = 1;
    };
    blit(small, 2, 2);
    blit(small_flipped, 22, 2);

    return {left, right, center};
}

ArrowTemplate load_template(const std::string& png_path, const std::string& json_path) {
    std::ifstream in(json_path);
    if (!in) throw input_error("cannot open template sidecar '" + json_path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error("malformed template sidecar '" + json_path + "': " + e.what());
    }
    if (!j.contains("label")) throw input_error("template sidecar '" + json_path + "' lacks 'label'");

    const auto img = raster::read_png_gray8(png_path);
    ArrowTemplate t;
    t.label = label_from_string(j["label"].get<std::string>());
    t.width = img.width;
    t.height = img.height;
    t.ink.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) t.ink[i] = img.pixels[i] >= 128 ? 1 : 0;

    if (j.contains("nominal_size")) {
        const int nw = j["nominal_size"].at(0).get<int>();
        const int nh = j["nominal_size"].at(1).get<int>();
        if (nw <= 0 || nh <= 0) throw input_error("template nominal_size must be positive");
        if (nw != t.width || nh != t.height) {
            ArrowTemplate scaled;
            scaled.label = t.label;
            scaled.width = nw;
            scaled.height = nh;
            scaled.ink.resize(static_cast<std::size_t>(nw) * nh);
            for (int y = 0; y < nh; ++y)
                for (int x = 0; x < nw; ++x)
                    scaled.ink[static_cast<std::size_t>(y) * nw + x] =
                        t.at(x * t.width / nw, y * t.height / nh);
            t = std::move(scaled);
        }
    }
    return t;
}

double ncc_score(const std::vector<double>& image, const std::vector<double>& templ) {
    if (image.size() != templ.size() || image.empty())
        throw input_error("ncc_score: patches must be equal-size and non-empty");
    const double n = static_cast<double>(image.size());
    double sum_a = 0.0, sum_b = 0.0;
    for (std::size_t i = 0; i < image.size(); ++i) {
        sum_a += image[i];
        sum_b += templ[i];
    }
    const double mean_a = sum_a / n;
    const double mean_b = sum_b / n;
    double var_a = 0.0, var_b = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < image.size(); ++i) {
        const double da = image[i] - mean_a;
        const double db = templ[i] - mean_b;
        var_a += da * da;
        var_b += db * db;
        cov += da * db;
    }
    if (var_a <= 0.0 || var_b <= 0.0)
        throw input_error("ncc_score: zero-variance patch has no defined score");
    return cov / std::sqrt(var_a * var_b);
}

std::vector<ChipDetection> detect_chip(const chip::Chip& c, const Detector& model) {
    const int outer = c.plan.outer_size();
    if (c.plan.chip_size <= 0 || c.plan.pad < 0 ||
        c.pixels.size() != static_cast<std::size_t>(outer) * outer * 3)
        throw input_error("detect_chip: malformed chip buffer");
    return model.detect(c);
}

ReferenceDetector::ReferenceDetector(std::vector<ArrowTemplate> templates, double score_floor)
    : templates_(std::move(templates)), score_floor_(score_floor) {
    if (templates_.empty()) throw input_error("reference detector needs at least one template");
    if (!(score_floor_ > -1.0 && score_floor_ < 1.0))
        throw input_error("score_floor must lie in (-1, 1)");
    for (std::size_t ti = 0; ti < templates_.size(); ++ti) {
        const auto& t = templates_[ti];
        const auto n = static_cast<std::int64_t>(t.width) * t.height;
        const std::int64_t ink = std::count(t.ink.begin(), t.ink.end(), std::uint8_t{1});
        if (t.width <= 0 || t.height <= 0 || static_cast<std::int64_t>(t.ink.size()) != n)
            throw input_error("template '" + std::string(label_name(t.label)) + "' is malformed");
        if (ink == 0 || ink == n)
            throw input_error("template '" + std::string(label_name(t.label)) +
                              "' has zero variance");
        for (int rot = 0; rot < 4; ++rot) {
            const ArrowTemplate r = rotate_template(t, rot);
            Variant v;
            v.label = r.label;
            v.width = r.width;
            v.height = r.height;
            v.rotation = rot;
            v.template_index = static_cast<int>(ti);
            v.ink_count = ink;
            for (int y = 0; y < r.height; ++y)
                for (int x = 0; x < r.width; ++x)
                    if (r.at(x, y))
                        v.ink_xy.emplace_back(static_cast<std::int16_t>(x),
                                              static_cast<std::int16_t>(y));
            variants_.push_back(std::move(v));
        }
    }
}

namespace {

struct Candidate {
    LaneLabel label;
    double score;
    int x, y, w, h;
    int template_index;
    int rotation;
};

} // namespace

std::vector<ChipDetection> ReferenceDetector::detect(const chip::Chip& c) const {
    const int outer = c.plan.outer_size();
    const int size = c.plan.chip_size;
    const int pad = c.plan.pad;
    if (c.pixels.size() != static_cast<std::size_t>(outer) * outer * 3)
        throw input_error("reference detector: malformed chip buffer");

    // Interior grayscale as r+g+b; NCC is unaffected by the missing 1/3.
    std::vector<std::int32_t> gray(static_cast<std::size_t>(size) * size);
    for (int y = 0; y < size; ++y) {
        const std::size_t src = (static_cast<std::size_t>(y + pad) * outer + pad) * 3;
        for (int x = 0; x < size; ++x) {
            const std::size_t p = src + static_cast<std::size_t>(x) * 3;
            gray[static_cast<std::size_t>(y) * size + x] =
                c.pixels[p] + c.pixels[p + 1] + c.pixels[p + 2];
        }
    }

    // Integer integral images; window variance of 0 is detected exactly.
    const int iw = size + 1;
    std::vector<std::int64_t> s1(static_cast<std::size_t>(iw) * iw, 0);
    std::vector<std::int64_t> s2(static_cast<std::size_t>(iw) * iw, 0);
    for (int y = 0; y < size; ++y) {
        std::int64_t row1 = 0, row2 = 0;
        for (int x = 0; x < size; ++x) {
            const std::int64_t g = gray[static_cast<std::size_t>(y) * size + x];
            row1 += g;
            row2 += g * g;
            const std::size_t i = static_cast<std::size_t>(y + 1) * iw + (x + 1);
            s1[i] = s1[i - iw] + row1;
            s2[i] = s2[i - iw] + row2;
        }
    }
    auto window_sums = [&](int x, int y, int w, int h, std::int64_t& sum, std::int64_t& sumsq) {
        const std::size_t a = static_cast<std::size_t>(y) * iw + x;
        const std::size_t b = static_cast<std::size_t>(y) * iw + (x + w);
        const std::size_t d = static_cast<std::size_t>(y + h) * iw + x;
        const std::size_t e = static_cast<std::size_t>(y + h) * iw + (x + w);
        sum = s1[e] - s1[b] - s1[d] + s1[a];
        sumsq = s2[e] - s2[b] - s2[d] + s2[a];
    };

    std::int64_t total_sum, total_sumsq;
    window_sums(0, 0, size, size, total_sum, total_sumsq);
    std::vector<Candidate> candidates;
    if (static_cast<std::int64_t>(size) * size * total_sumsq == total_sum * total_sum)
        return {}; // flat interior (e.g. all nodata)

    for (const auto& v : variants_) {
        if (v.width > size || v.height > size) continue;
        const std::int64_t n = static_cast<std::int64_t>(v.width) * v.height;
        // For a binary template, sum(T) = ink_count and n*var(T) scales to:
        const std::int64_t tvar_n = n * v.ink_count - v.ink_count * v.ink_count;
        std::vector<std::int32_t> offsets(v.ink_xy.size());
        for (std::size_t i = 0; i < v.ink_xy.size(); ++i)
            offsets[i] = v.ink_xy[i].second * size + v.ink_xy[i].first;

        for (int y = 0; y + v.height <= size; ++y) {
            for (int x = 0; x + v.width <= size; ++x) {
                std::int64_t sum, sumsq;
                window_sums(x, y, v.width, v.height, sum, sumsq);
                const std::int64_t ivar_n = n * sumsq - sum * sum;
                if (ivar_n <= 0) continue; // flat window, score undefined
                const std::int32_t* base = gray.data() + static_cast<std::size_t>(y) * size + x;
                std::int64_t cross = 0;
                for (const auto off : offsets) cross += base[off];
                const auto num = static_cast<double>(n * cross - sum * v.ink_count);
                const double score =
                    num / std::sqrt(static_cast<double>(ivar_n) * static_cast<double>(tvar_n));
                if (score >= score_floor_)
                    candidates.push_back({v.label, score, x, y, v.width, v.height,
                                          v.template_index, v.rotation});
            }
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.label != b.label) return label_id(a.label) < label_id(b.label);
        if (a.y != b.y) return a.y < b.y;
        if (a.x != b.x) return a.x < b.x;
        if (a.template_index != b.template_index) return a.template_index < b.template_index;
        return a.rotation < b.rotation;
    });

    // Greedy suppression of same-class maxima closer than half a template size.
    std::vector<Candidate> kept;
    for (const auto& cand : candidates) {
        const double cx = cand.x + cand.w * 0.5;
        const double cy = cand.y + cand.h * 0.5;
        bool suppressed = false;
        for (const auto& k : kept) {
            if (k.label != cand.label) continue;
            const double limit = 0.5 * std::max({cand.w, cand.h, k.w, k.h});
            const double dx = cx - (k.x + k.w * 0.5);
            const double dy = cy - (k.y + k.h * 0.5);
            if (dx * dx + dy * dy < limit * limit) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(cand);
    }

    std::vector<ChipDetection> out;
    out.reserve(kept.size());
    for (const auto& k : kept) {
        const double conf =
            std::clamp((k.score - score_floor_) / (1.0 - score_floor_), kConfidenceFloor, 1.0);
        out.push_back({k.label, {k.x, k.y, k.x + k.w, k.y + k.h}, conf});
    }
    return out;
}

std::vector<ChipDetection> reference_detect(const chip::Chip& c,
                                            std::vector<ArrowTemplate> templates,
                                            double score_floor) {
    return detect_chip(c, ReferenceDetector(std::move(templates), score_floor));
}

std::unique_ptr<Detector> make_detector(const std::string& engine, Schema schema,
                                        double score_floor) {
    if (engine == "reference")
        return std::make_unique<ReferenceDetector>(builtin_templates(schema), score_floor);
    throw input_error("unknown detector engine '" + engine + "' (available: reference)");
}

std::string model_card_json() {
    nlohmann::json card;
    card["engine"] = "yolov3-darknet53";
    card["status"] = "externally trained; recorded for documentation, never executed here";
    card["input"] = {{"chip_size", 256}, {"pad", 56}, {"resolution_ft_per_px", 0.5}};
    card["hyperparameters"] = {
        {"learning_rate", {{"12-class", 1.096e-06}, {"4-class", 3.311e-06}}},
        {"batch_size", 64},
        {"anchor_boxes", 9},
    };
    card["split"] = {{"train", 0.70}, {"validation", 0.15}, {"test", 0.15}};
    card["labeled_features"] = {{"12-class", 23669}, {"4-class", 8241}};
    card["training_chips"] = {{"12-class", 468176}, {"4-class", 144224}};
    card["training_features"] = {{"12-class", 567876}, {"4-class", 185560}};
    return card.dump(2) + "\n";
}

} // namespace lanemark::detect
