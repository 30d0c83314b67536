#include "uwimg/water_types.hpp"

#include <algorithm>

namespace uwimg {

namespace {

struct TableRow {
  WaterType type;
  std::string_view label;
  IopTriple iop;
};

// Jerlov water IOPs (Solonenko & Mobley 2015), columns R=650 nm, G=525 nm, B=450 nm.
// Copied verbatim, including the 5C red absorption and the non-monotonic IB scattering.
constexpr std::array<TableRow, 10> kTable{{
    {WaterType::I, "I", {{0.334, 0.046, 0.018}, {0.0009, 0.0021, 0.0038}}},
    {WaterType::IA, "IA", {{0.334, 0.047, 0.022}, {0.0023, 0.0040, 0.0063}}},
    {WaterType::IB, "IB", {{0.334, 0.047, 0.024}, {0.393, 0.078, 0.062}}},
    {WaterType::II, "II", {{0.334, 0.047, 0.024}, {0.27, 0.387, 0.504}}},
    {WaterType::III, "III", {{0.336, 0.051, 0.039}, {0.74, 1.06, 1.38}}},
    {WaterType::C1, "1C", {{0.344, 0.068, 0.105}, {0.274, 0.395, 0.514}}},
    {WaterType::C3, "3C", {{0.346, 0.078, 0.154}, {0.8, 1.15, 1.5}}},
    {WaterType::C5, "5C", {{1.78, 0.127, 0.297}, {2.87, 1.44, 1.87}}},
    {WaterType::C7, "7C", {{0.403, 0.233, 0.542}, {1.77, 2.54, 3.3}}},
    {WaterType::C9, "9C", {{0.456, 0.43, 0.943}, {2.35, 3.38, 4.39}}},
}};

const TableRow& row_for(WaterType type) {
  return *std::find_if(kTable.begin(), kTable.end(),
                       [type](const TableRow& row) { return row.type == type; });
}

}  // namespace

std::string_view to_string(WaterType type) { return row_for(type).label; }

std::optional<WaterType> parse_water_type(std::string_view label) {
  for (const auto& row : kTable) {
    if (row.label == label) return row.type;
  }
  // Accept the "C"-prefixed enumerator spelling too.
  if (label.size() == 2 && label[0] == 'C') {
    const char digits[3] = {label[1], 'C', '\0'};
    return parse_water_type(std::string_view(digits, 2));
  }
  return std::nullopt;
}

IopTriple iop_lookup(WaterType type) { return row_for(type).iop; }

}  // namespace uwimg
