#pragma once

#include "lanemark/chip.hpp"
#include "lanemark/labels.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace lanemark::detect {

/// Integer pixel box, min inclusive, max exclusive.
struct PixelBox {
    int min_x{0};
    int min_y{0};
    int max_x{0};
    int max_y{0};

    int width() const { return max_x - min_x; }
    int height() const { return max_y - min_y; }
    bool operator==(const PixelBox&) const = default;
};

/// One detection inside a chip, bbox in chip-interior coordinates.
struct ChipDetection {
    LaneLabel label{LaneLabel::none};
    PixelBox bbox;
    double confidence{0.0};
};

inline constexpr double kConfidenceFloor = 0.05;

/// Binary marking stencil (1 = painted marking, 0 = pavement).
struct ArrowTemplate {
    LaneLabel label{LaneLabel::none};
    int width{0};
    int height{0};
    std::vector<std::uint8_t> ink; // width * height, 0/1

    std::uint8_t at(int x, int y) const {
        return ink[static_cast<std::size_t>(y) * width + x];
    }
};

ArrowTemplate rotate_template(const ArrowTemplate& t, int quarter_turns_cw);
ArrowTemplate mirror_template(const ArrowTemplate& t);

/// Built-in stencils: left_only, its exact mirror as right_only, and a
/// center stencil made of two opposing smaller left arrows. The same set
/// serves both schemas (no stencils exist for the other 12-class labels).
std::vector<ArrowTemplate> builtin_templates(Schema schema = Schema::four_class);

/// PNG stencil (>=128 = ink) + JSON sidecar {"label": ..., optional
/// "nominal_size": [w, h]} which resamples the stencil when present.
ArrowTemplate load_template(const std::string& png_path, const std::string& json_path);

/// Zero-normalized cross correlation of two equal-size patches, in [-1, 1].
/// Throws input_error when either patch has zero variance.
double ncc_score(const std::vector<double>& image, const std::vector<double>& templ);

/// Per-chip detector interface. Implementations must be deterministic and
/// immutable after construction; any engine honoring the contract (all
/// confidences in [0.05, 1], boxes inside the interior) can be plugged in.
class Detector {
public:
    virtual ~Detector() = default;
    virtual std::vector<ChipDetection> detect(const chip::Chip& c) const = 0;
};

/// Validates the chip buffer, then runs the engine.
std::vector<ChipDetection> detect_chip(const chip::Chip& c, const Detector& model);

/// Deterministic template-correlation detector. Slides every template at
/// its nominal scale and at 90/180/270 degree rotations over the chip's
/// grayscale interior; positions scoring >= score_floor survive a greedy
/// same-class suppression of maxima closer than half a template size.
/// Confidence = (score - floor) / (1 - floor), clamped to [0.05, 1].
class ReferenceDetector : public Detector {
public:
    explicit ReferenceDetector(std::vector<ArrowTemplate> templates, double score_floor = 0.8);

    std::vector<ChipDetection> detect(const chip::Chip& c) const override;

    double score_floor() const { return score_floor_; }

private:
    struct Variant {
        LaneLabel label;
        int width, height;
        int rotation;          // quarter turns
        int template_index;
        std::vector<std::pair<std::int16_t, std::int16_t>> ink_xy;
        std::int64_t ink_count;
    };

    std::vector<ArrowTemplate> templates_;
    std::vector<Variant> variants_;
    double score_floor_;
};

/// One-shot reference detection without keeping a detector around.
std::vector<ChipDetection> reference_detect(const chip::Chip& c,
                                            std::vector<ArrowTemplate> templates,
                                            double score_floor = 0.8);

/// Builds a named engine; "reference" is the only built-in.
std::unique_ptr<Detector> make_detector(const std::string& engine, Schema schema,
                                        double score_floor);

/// Documented constants of the externally trained neural model as a JSON
/// record. Nothing here is executed by this library.
std::string model_card_json();

} // namespace lanemark::detect
