#pragma once

#include "lanemark/detect.hpp"
#include "lanemark/geo.hpp"
#include "lanemark/labels.hpp"
#include "lanemark/raster.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace lanemark::trainprep {

/// Hand-labeled marking with a world bounding box.
struct LabeledFeature {
    LaneLabel label{LaneLabel::left_only};
    geo::WorldBox bbox;
    std::string tile_id;
};

struct VocObject {
    LaneLabel label{LaneLabel::left_only};
    detect::PixelBox bbox; // chip pixels
};

enum class SplitSet { train, validation, test };
const char* split_name(SplitSet s);

struct TrainingChip {
    std::string chip_id; // "{tile_id}_{col}_{row}" plus a suffix for duplicates
    std::string tile_id;
    int window_col{0};
    int window_row{0};
    int chip_size{256};
    std::vector<VocObject> objects;
    std::vector<std::uint8_t> pixels; // chip_size² RGB
    bool rotate_flag{false};          // augment-by-rotation marker on duplicates
};

struct TrainingManifest {
    Schema schema{Schema::four_class};
    std::uint64_t seed{0};
    std::vector<TrainingChip> chips;
    std::vector<SplitSet> split; // parallel to chips once assigned
    std::vector<std::string> warnings;

    std::map<LaneLabel, long> class_counts() const;
};

/// One chip per distinct feature-covering window (stride-grid windows; the
/// first window fully containing the feature, else the max-overlap window
/// with the feature clipped and a warning recorded). Every chip lists all
/// features fully contained in its window.
TrainingManifest export_chips(const std::vector<raster::RasterTile>& tiles,
                              const std::vector<LabeledFeature>& features,
                              int chip_size = 256, Schema schema = Schema::four_class);

/// Pascal VOC annotation document for one chip.
std::string voc_xml(const TrainingChip& chip, const std::string& filename);

struct VocAnnotation {
    std::string filename;
    int width{0};
    int height{0};
    std::vector<VocObject> objects;
};

VocAnnotation parse_voc(const std::string& xml);

/// Clockwise quarter turn of an RGB chip and its boxes:
/// (x1,y1,x2,y2) -> (H - y2, x1, H - y1, x2).
struct RotatedChip {
    int width{0};
    int height{0};
    std::vector<std::uint8_t> pixels;
    std::vector<VocObject> objects;
};

RotatedChip rotate90(const std::vector<std::uint8_t>& pixels, int width, int height,
                     const std::vector<VocObject>& objects);

/// Duplicates chips carrying under-represented classes until each class
/// reaches the target count (default: median class count). Duplicates are
/// rotation-flagged; nothing is removed or relabeled.
TrainingManifest balance_classes(TrainingManifest manifest, long target = -1);

/// Deterministic seeded 70/15/15 partition into train/validation/test.
void assign_split(TrainingManifest& manifest, std::uint64_t seed);

void write_manifest_csv(std::ostream& out, const TrainingManifest& manifest);

/// Materializes the training set: one PNG + VOC XML per chip (rotate-flagged
/// duplicates are written rotated), plus manifest.csv, under `dir`.
void write_training_set(const std::string& dir, const TrainingManifest& manifest);

} // namespace lanemark::trainprep
