#pragma once

#include <filesystem>
#include <vector>

#include "dysalign/grad/parameter.hpp"

namespace dysalign::grad {

// Writes one NAFM file per parameter plus manifest.json listing name, shape
// and file. Values are narrowed to float32.
void save_checkpoint(const std::filesystem::path& dir, const std::vector<const Parameter*>& params);

// Loads values by name into `params`; every parameter must be present with a
// matching shape (ShapeError otherwise).
void load_checkpoint(const std::filesystem::path& dir, const std::vector<Parameter*>& params);

}  // namespace dysalign::grad
