#include "lanemark/labels.hpp"

#include "lanemark/errors.hpp"

#include <array>
#include <cstdlib>

namespace lanemark {

namespace {

constexpr std::array<const char*, 12> kNames = {
    "left_only",  "right_only", "left_right", "through",
    "left_through", "right_through", "left_right_through", "center",
    "bicycle",    "merge",      "u_turn",     "none",
};

} // namespace

int label_id(LaneLabel label) { return static_cast<int>(label); }

const char* label_name(LaneLabel label) {
    const int id = label_id(label);
    if (id < 1 || id > 12) throw input_error("unknown lane label id " + std::to_string(id));
    return kNames[static_cast<std::size_t>(id - 1)];
}

LaneLabel label_from_string(const std::string& s) {
    for (int id = 1; id <= 12; ++id) {
        if (s == kNames[static_cast<std::size_t>(id - 1)]) return static_cast<LaneLabel>(id);
    }
    char* end = nullptr;
    const long id = std::strtol(s.c_str(), &end, 10);
    if (end && *end == '\0' && id >= 1 && id <= 12) return static_cast<LaneLabel>(id);
    throw input_error("unknown lane label '" + s + "'");
}

bool in_schema(LaneLabel label, Schema schema) {
    if (schema == Schema::twelve_class) return true;
    switch (label) {
    case LaneLabel::left_only:
    case LaneLabel::right_only:
    case LaneLabel::center:
    case LaneLabel::none:
        return true;
    default:
        return false;
    }
}

std::vector<LaneLabel> schema_labels(Schema schema) {
    std::vector<LaneLabel> out;
    for (int id = 1; id <= 12; ++id) {
        const auto label = static_cast<LaneLabel>(id);
        if (in_schema(label, schema)) out.push_back(label);
    }
    return out;
}

std::vector<LaneLabel> positive_labels(Schema schema) {
    auto all = schema_labels(schema);
    std::erase(all, LaneLabel::none);
    return all;
}

LaneLabel project_to_4class(LaneLabel label) {
    return in_schema(label, Schema::four_class) ? label : LaneLabel::none;
}

const char* schema_name(Schema schema) {
    return schema == Schema::four_class ? "4-class" : "12-class";
}

Schema schema_from_class_count(int classes) {
    if (classes == 4) return Schema::four_class;
    if (classes == 12) return Schema::twelve_class;
    throw input_error("schema must be 4 or 12, got " + std::to_string(classes));
}

} // namespace lanemark
