#include "dysalign/grad/checkpoint.hpp"

#include <cctype>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "dysalign/core/error.hpp"
#include "dysalign/core/matrix.hpp"

namespace dysalign::grad {

namespace {

std::string file_name_for(const std::string& name) {
  std::string out;
  for (char c : name) out.push_back((std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_') ? c : '_');
  return out + ".nafm";
}

}  // namespace

void save_checkpoint(const std::filesystem::path& dir, const std::vector<const Parameter*>& params) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create checkpoint directory " + dir.string());
  nlohmann::ordered_json manifest;
  manifest["format"] = "nafm-checkpoint";
  manifest["parameters"] = nlohmann::ordered_json::array();
  for (const Parameter* p : params) {
    std::vector<float> data(p->values.begin(), p->values.end());
    const std::string file = file_name_for(p->name);
    write_matrix(dir / file, FeatureMatrix(static_cast<std::uint32_t>(p->rows), static_cast<std::uint32_t>(p->cols),
                                           std::move(data)));
    manifest["parameters"].push_back({{"name", p->name}, {"rows", p->rows}, {"cols", p->cols}, {"file", file}});
  }
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

void load_checkpoint(const std::filesystem::path& dir, const std::vector<Parameter*>& params) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("missing checkpoint manifest in " + dir.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint manifest: " + std::string(e.what()));
  }
  std::unordered_map<std::string, nlohmann::json> entries;
  for (const auto& e : manifest.at("parameters")) entries[e.at("name").get<std::string>()] = e;
  for (Parameter* p : params) {
    auto it = entries.find(p->name);
    if (it == entries.end()) throw FormatError("checkpoint lacks parameter '" + p->name + "'");
    const FeatureMatrix m = read_matrix(dir / it->second.at("file").get<std::string>());
    if (m.rows() != p->rows || m.cols() != p->cols)
      throw ShapeError("checkpoint parameter '" + p->name + "' has shape " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()));
    p->values.assign(m.data().begin(), m.data().end());
    p->grads.assign(p->values.size(), 0.0);
  }
}

}  // namespace dysalign::grad
