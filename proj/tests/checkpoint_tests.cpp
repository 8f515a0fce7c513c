#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "gcl/checkpoint.hpp"
#include "gcl/dataset.hpp"
#include "gcl/rng.hpp"

using gcl::Checkpoint;
using gcl::DataError;
using gcl::Matd;
using gcl::ParamRegistry;
using gcl::Tensord;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("gcl_ckpt_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int counter;
};
int TempDir::counter = 0;

ParamRegistry sample_registry(gcl::RngStream& rng) {
  ParamRegistry reg;
  Matd a(2, 3), b(1, 1), c(3, 2);
  for (Matd* m : {&a, &b, &c})
    for (Eigen::Index i = 0; i < m->rows(); ++i)
      for (Eigen::Index j = 0; j < m->cols(); ++j) (*m)(i, j) = rng.uniform(-2.0, 2.0);
  reg.add("enc.l1.W", Tensord::param(a));
  reg.add("enc.l1.eps", Tensord::param(b));
  reg.add("gen.l2.W", Tensord::param(c));
  return reg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("checkpoints round trip values, names, and metadata exactly") {
  TempDir dir;
  gcl::RngStream rng(90);
  ParamRegistry reg = sample_registry(rng);
  nlohmann::json meta{{"hidden", 16}, {"strategy", "joint"}, {"note", "round trip"}};
  gcl::save_checkpoint(dir.file("m.ckpt"), meta, reg);

  Checkpoint ckpt = gcl::load_checkpoint(dir.file("m.ckpt"));
  CHECK(ckpt.meta["hidden"] == 16);
  CHECK(ckpt.meta["strategy"] == "joint");
  CHECK(ckpt.tensors.size() == reg.size());
  for (const auto& [name, t] : reg.items) {
    const Matd* m = ckpt.find(name);
    REQUIRE(m != nullptr);
    CHECK(*m == t.value());  // float64 payload, bitwise
  }
  CHECK(ckpt.find("no.such.tensor") == nullptr);
}

TEST_CASE("load_into restores a freshly initialized registry") {
  TempDir dir;
  gcl::RngStream rng(91);
  ParamRegistry saved = sample_registry(rng);
  gcl::save_checkpoint(dir.file("m.ckpt"), {}, saved);

  ParamRegistry fresh = sample_registry(rng);  // same names, different values
  CHECK((fresh.find("enc.l1.W")->value() - saved.find("enc.l1.W")->value())
            .cwiseAbs()
            .maxCoeff() > 1e-12);
  gcl::load_into(gcl::load_checkpoint(dir.file("m.ckpt")), fresh);
  for (const auto& [name, t] : saved.items)
    CHECK(fresh.find(name)->value() == t.value());
}

TEST_CASE("load_into rejects name, shape, and count mismatches") {
  TempDir dir;
  gcl::RngStream rng(92);
  ParamRegistry saved = sample_registry(rng);
  gcl::save_checkpoint(dir.file("m.ckpt"), {}, saved);
  Checkpoint ckpt = gcl::load_checkpoint(dir.file("m.ckpt"));

  ParamRegistry renamed;
  renamed.add("enc.l1.W", Tensord::param(Matd::Zero(2, 3)));
  renamed.add("enc.l1.eps", Tensord::param(Matd::Zero(1, 1)));
  renamed.add("other.name", Tensord::param(Matd::Zero(3, 2)));
  CHECK_THROWS_AS(gcl::load_into(ckpt, renamed), DataError);

  ParamRegistry reshaped;
  reshaped.add("enc.l1.W", Tensord::param(Matd::Zero(3, 2)));  // transposed
  reshaped.add("enc.l1.eps", Tensord::param(Matd::Zero(1, 1)));
  reshaped.add("gen.l2.W", Tensord::param(Matd::Zero(3, 2)));
  CHECK_THROWS_AS(gcl::load_into(ckpt, reshaped), DataError);

  ParamRegistry fewer;
  fewer.add("enc.l1.W", Tensord::param(Matd::Zero(2, 3)));
  CHECK_THROWS_AS(gcl::load_into(ckpt, fewer), DataError);
}

TEST_CASE("corrupt files are rejected with data errors") {
  TempDir dir;
  gcl::RngStream rng(93);
  ParamRegistry reg = sample_registry(rng);
  gcl::save_checkpoint(dir.file("good.ckpt"), {{"k", 1}}, reg);
  const std::string good = read_file(dir.file("good.ckpt"));

  SUBCASE("missing file") {
    CHECK_THROWS_AS((void)gcl::load_checkpoint(dir.file("absent.ckpt")), DataError);
  }
  SUBCASE("empty file") {
    write_file(dir.file("empty.ckpt"), "");
    CHECK_THROWS_AS((void)gcl::load_checkpoint(dir.file("empty.ckpt")), DataError);
  }
  SUBCASE("wrong magic") {
    std::string bad = good;
    bad[0] = 'X';
    write_file(dir.file("magic.ckpt"), bad);
    CHECK_THROWS_AS((void)gcl::load_checkpoint(dir.file("magic.ckpt")), DataError);
  }
  SUBCASE("truncated header") {
    write_file(dir.file("short.ckpt"), good.substr(0, 6));
    CHECK_THROWS_AS((void)gcl::load_checkpoint(dir.file("short.ckpt")), DataError);
  }
  SUBCASE("truncated payload") {
    write_file(dir.file("cut.ckpt"), good.substr(0, good.size() - 9));
    CHECK_THROWS_AS((void)gcl::load_checkpoint(dir.file("cut.ckpt")), DataError);
  }
  SUBCASE("manifest length past end of file") {
    std::string bad = good;
    bad[8] = '\xff';
    bad[9] = '\xff';
    bad[10] = '\xff';
    bad[11] = '\x0f';
    write_file(dir.file("len.ckpt"), bad);
    CHECK_THROWS_AS((void)gcl::load_checkpoint(dir.file("len.ckpt")), DataError);
  }
  SUBCASE("garbage manifest bytes") {
    std::string bad = good;
    for (std::size_t i = 12; i < 20 && i < bad.size(); ++i) bad[i] = '!';
    write_file(dir.file("garbage.ckpt"), bad);
    CHECK_THROWS_AS((void)gcl::load_checkpoint(dir.file("garbage.ckpt")), DataError);
  }
}

TEST_CASE("an empty registry saves and loads") {
  TempDir dir;
  ParamRegistry reg;
  gcl::save_checkpoint(dir.file("empty.ckpt"), {{"only", "meta"}}, reg);
  Checkpoint ckpt = gcl::load_checkpoint(dir.file("empty.ckpt"));
  CHECK(ckpt.tensors.empty());
  CHECK(ckpt.meta["only"] == "meta");
}
