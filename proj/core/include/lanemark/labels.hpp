#pragma once

#include <string>
#include <vector>

namespace lanemark {

/// Turning-lane marking classes. IDs are stable and shared by both schemas;
/// the 4-class schema is the subset {left_only, right_only, center, none}.
enum class LaneLabel : int {
    left_only = 1,
    right_only = 2,
    left_right = 3,
    through = 4,
    left_through = 5,
    right_through = 6,
    left_right_through = 7,
    center = 8,
    bicycle = 9,
    merge = 10,
    u_turn = 11,
    none = 12,
};

enum class Schema { four_class, twelve_class };

int label_id(LaneLabel label);
const char* label_name(LaneLabel label);

/// Parses either a class name ("left_only") or a numeric ID ("1").
LaneLabel label_from_string(const std::string& s);

bool in_schema(LaneLabel label, Schema schema);

/// Labels of a schema in ID order (includes `none`).
std::vector<LaneLabel> schema_labels(Schema schema);

/// Positive (detectable) labels of a schema, i.e. everything but `none`.
std::vector<LaneLabel> positive_labels(Schema schema);

/// Projects a 12-class label into the 4-class schema: {left_only,
/// right_only, center} pass through, everything else collapses to `none`.
LaneLabel project_to_4class(LaneLabel label);

const char* schema_name(Schema schema);
Schema schema_from_class_count(int classes); // 4 or 12

} // namespace lanemark
