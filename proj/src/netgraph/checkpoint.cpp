#include "ascnet/netgraph/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>

#include <json.hpp>

#include "ascnet/configio.hpp"
#include "ascnet/core/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian; big-endian hosts are unsupported");

namespace ascnet::netgraph {

namespace {

constexpr char kMagic[8] = {'A', 'S', 'C', 'N', 'E', 'T', 'B', '1'};
constexpr uint32_t kVersion = 1;

struct Writer {
  std::FILE* f;
  explicit Writer(const std::string& path) : f(std::fopen(path.c_str(), "wb")) {
    if (f == nullptr) throw io_error("cannot write checkpoint: " + path);
  }
  ~Writer() {
    if (f != nullptr) std::fclose(f);
  }
  void bytes(const void* p, size_t n) {
    if (std::fwrite(p, 1, n, f) != n) throw io_error("checkpoint write failed");
  }
  void u32(uint32_t v) { bytes(&v, sizeof(v)); }
  void u64(uint64_t v) { bytes(&v, sizeof(v)); }
  void i32(int32_t v) { bytes(&v, sizeof(v)); }
  void i64(int64_t v) { bytes(&v, sizeof(v)); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void tensor(const std::string& name, const Tensor& t) {
    str(name);
    i32(t.n());
    i32(t.c());
    i32(t.h());
    i32(t.w());
    bytes(t.data(), t.size() * sizeof(double));
  }
};

struct Reader {
  std::FILE* f;
  std::string path;
  explicit Reader(const std::string& p) : f(std::fopen(p.c_str(), "rb")), path(p) {
    if (f == nullptr) throw io_error("cannot open checkpoint: " + p);
  }
  ~Reader() {
    if (f != nullptr) std::fclose(f);
  }
  void bytes(void* p, size_t n) {
    if (std::fread(p, 1, n, f) != n) throw data_error("truncated checkpoint: " + path);
  }
  uint32_t u32() {
    uint32_t v;
    bytes(&v, sizeof(v));
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    bytes(&v, sizeof(v));
    return v;
  }
  int32_t i32() {
    int32_t v;
    bytes(&v, sizeof(v));
    return v;
  }
  int64_t i64() {
    int64_t v;
    bytes(&v, sizeof(v));
    return v;
  }
  std::string str() {
    uint32_t n = u32();
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  Tensor tensor() {
    int n = i32(), c = i32(), h = i32(), w = i32();
    Tensor t(n, c, h, w);
    bytes(t.data(), t.size() * sizeof(double));
    return t;
  }
};

}  // namespace

void save_model_bundle(const std::string& path, ModelState& state,
                       const std::map<std::string, Tensor>& extra) {
  Writer w(path);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  nlohmann::json cfg = state.config;
  w.str(cfg.dump());
  w.i64(state.step_counter);
  w.i32(state.stage);
  w.i32(state.cycle_index);

  auto params = main_params(state);
  auto dparams = disc_params(state);
  auto stats = batchnorm_stats(state);
  w.u32(static_cast<uint32_t>(params.size() + dparams.size() + stats.size() + extra.size()));
  for (const auto& p : params) w.tensor(p.name, *p.value);
  for (const auto& p : dparams) w.tensor(p.name, *p.value);
  for (const auto& s : stats) w.tensor(s.name, *s.value);
  for (const auto& [name, t] : extra) w.tensor(name, t);
}

ModelState load_model_bundle(const std::string& path, std::map<std::string, Tensor>* extra) {
  Reader r(path);
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw data_error("not a checkpoint file: " + path);
  }
  uint32_t version = r.u32();
  if (version != kVersion) {
    throw data_error("unsupported checkpoint version " + std::to_string(version) + ": " + path);
  }
  NetworkConfig cfg = nlohmann::json::parse(r.str()).get<NetworkConfig>();
  // Structure from config; every stored tensor overwrites the fresh init.
  ModelState state = init_model(cfg, 0);
  state.step_counter = r.i64();
  state.stage = r.i32();
  state.cycle_index = r.i32();

  std::map<std::string, Tensor*> by_name;
  for (auto& p : main_params(state)) by_name[p.name] = p.value;
  for (auto& p : disc_params(state)) by_name[p.name] = p.value;
  for (auto& s : batchnorm_stats(state)) by_name[s.name] = s.value;

  uint32_t count = r.u32();
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = r.str();
    Tensor t = r.tensor();
    auto it = by_name.find(name);
    if (it != by_name.end()) {
      if (!it->second->same_shape(t)) {
        throw data_error("checkpoint tensor shape mismatch for " + name + ": " + path);
      }
      *it->second = std::move(t);
    } else if (extra != nullptr) {
      (*extra)[name] = std::move(t);
    }
    // Unknown tensors without an extra sink are skipped.
  }
  return state;
}

}  // namespace ascnet::netgraph
