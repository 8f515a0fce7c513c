#include "gcl/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace gcl {

namespace {

constexpr char kMagic[8] = {'G', 'C', 'L', 'C', 'K', 'P', 'T', '1'};

[[noreturn]] void corrupt(const std::string& path, const std::string& why) {
  throw DataError("checkpoint '" + path + "': " + why);
}

}  // namespace

const Matd* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, m] : tensors)
    if (n == name) return &m;
  return nullptr;
}

void save_checkpoint(const std::string& path, const nlohmann::json& meta,
                     const ParamRegistry& params) {
  nlohmann::json manifest;
  manifest["meta"] = meta;
  auto& list = manifest["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : params.items) {
    const Matd& v = t.value();
    list.push_back({{"name", name},
                    {"rows", v.rows()},
                    {"cols", v.cols()},
                    {"offset", offset}});
    offset += static_cast<std::uint64_t>(v.size()) * sizeof(double);
  }
  std::string mstr = manifest.dump();

  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint file '" + path + "'");
  out.write(kMagic, sizeof(kMagic));
  std::uint32_t mlen = static_cast<std::uint32_t>(mstr.size());
  out.write(reinterpret_cast<const char*>(&mlen), sizeof(mlen));
  out.write(mstr.data(), static_cast<std::streamsize>(mstr.size()));
  for (const auto& [name, t] : params.items) {
    const Matd& v = t.value();
    for (int r = 0; r < v.rows(); ++r)
      for (int c = 0; c < v.cols(); ++c) {
        double x = v(r, c);
        out.write(reinterpret_cast<const char*>(&x), sizeof(x));
      }
  }
  if (!out) throw std::runtime_error("write failed for checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  std::string raw((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (raw.size() < sizeof(kMagic) + sizeof(std::uint32_t))
    corrupt(path, "file too short");
  if (std::memcmp(raw.data(), kMagic, sizeof(kMagic)) != 0)
    corrupt(path, "bad magic");
  std::uint32_t mlen = 0;
  std::memcpy(&mlen, raw.data() + sizeof(kMagic), sizeof(mlen));
  std::size_t payload_at = sizeof(kMagic) + sizeof(std::uint32_t) + mlen;
  if (payload_at > raw.size()) corrupt(path, "manifest extends past end of file");

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(
        raw.substr(sizeof(kMagic) + sizeof(std::uint32_t), mlen));
  } catch (const nlohmann::json::exception& e) {
    corrupt(path, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!manifest.contains("tensors") || !manifest["tensors"].is_array())
    corrupt(path, "manifest has no tensor list");

  Checkpoint ckpt;
  ckpt.meta = manifest.value("meta", nlohmann::json::object());
  std::size_t payload_bytes = raw.size() - payload_at;
  for (const auto& entry : manifest["tensors"]) {
    if (!entry.contains("name") || !entry.contains("rows") ||
        !entry.contains("cols") || !entry.contains("offset"))
      corrupt(path, "tensor entry missing a field");
    std::string name = entry["name"].get<std::string>();
    std::int64_t rows = entry["rows"].get<std::int64_t>();
    std::int64_t cols = entry["cols"].get<std::int64_t>();
    std::uint64_t off = entry["offset"].get<std::uint64_t>();
    if (rows < 0 || cols < 0) corrupt(path, "negative shape for '" + name + "'");
    std::uint64_t bytes =
        static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols) *
        sizeof(double);
    if (off > payload_bytes || bytes > payload_bytes - off)
      corrupt(path, "tensor '" + name + "' extends past end of file");
    Matd m(rows, cols);
    const char* src = raw.data() + payload_at + off;
    for (std::int64_t r = 0; r < rows; ++r)
      for (std::int64_t c = 0; c < cols; ++c) {
        double x;
        std::memcpy(&x, src, sizeof(x));
        src += sizeof(x);
        m(r, c) = x;
      }
    ckpt.tensors.emplace_back(std::move(name), std::move(m));
  }
  return ckpt;
}

void load_into(const Checkpoint& ckpt, ParamRegistry& params) {
  if (ckpt.tensors.size() != params.size())
    throw DataError("checkpoint holds " + std::to_string(ckpt.tensors.size()) +
                    " tensors, model has " + std::to_string(params.size()));
  for (auto& [name, t] : params.items) {
    const Matd* m = ckpt.find(name);
    if (m == nullptr) throw DataError("checkpoint is missing tensor '" + name + "'");
    Matd& v = t.value();
    if (m->rows() != v.rows() || m->cols() != v.cols())
      throw DataError("checkpoint tensor '" + name + "' has shape " +
                      std::to_string(m->rows()) + "x" + std::to_string(m->cols()) +
                      ", model expects " + std::to_string(v.rows()) + "x" +
                      std::to_string(v.cols()));
    v = *m;
  }
}

}  // namespace gcl
