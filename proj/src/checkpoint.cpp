#include "glaucofuse/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "glaucofuse/error.hpp"

namespace glaucofuse {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[4] = {'G', 'F', 'C', 'K'};

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw Error(ErrorKind::CheckpointMismatch, "truncated checkpoint");
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ck.variant));
  if (is_cnn(ck.variant)) {
    if (!ck.cnn) throw Error(ErrorKind::CheckpointMismatch, "CNN variant without model");
    const auto& cfg = ck.cnn->config();
    put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.in_channels));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.input_pool));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.feature_dim));
    put<std::uint32_t>(out, ck.cnn->use_vcdr() ? 1u : 0u);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.block_widths.size()));
    for (int w : cfg.block_widths) put<std::uint32_t>(out, static_cast<std::uint32_t>(w));
    put<std::uint64_t>(out, ck.cnn->params().size());
    for (double p : ck.cnn->params()) put<double>(out, p);
  } else {
    if (!ck.logistic) throw Error(ErrorKind::CheckpointMismatch, "logistic variant without model");
    for (int i = 0; i < 5; ++i) put<std::uint32_t>(out, 0u);
    put<std::uint64_t>(out, 2);
    put<double>(out, ck.logistic->slope);
    put<double>(out, ck.logistic->intercept);
  }
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::CheckpointMismatch, "bad checkpoint magic");
  }
  Reader r(bytes);
  r.get<std::uint32_t>();
  if (const auto version = r.get<std::uint32_t>(); version != kCheckpointVersion) {
    throw Error(ErrorKind::CheckpointMismatch, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto variant_code = r.get<std::uint32_t>();
  if (variant_code > static_cast<std::uint32_t>(Variant::VcdrLogistic)) {
    throw Error(ErrorKind::CheckpointMismatch, "unknown variant code");
  }
  Checkpoint ck;
  ck.variant = static_cast<Variant>(variant_code);
  BackboneConfig cfg;
  cfg.in_channels = static_cast<int>(r.get<std::uint32_t>());
  cfg.input_pool = static_cast<int>(r.get<std::uint32_t>());
  cfg.feature_dim = static_cast<int>(r.get<std::uint32_t>());
  const bool use_vcdr = r.get<std::uint32_t>() != 0;
  const auto n_blocks = r.get<std::uint32_t>();
  if (n_blocks > 64) throw Error(ErrorKind::CheckpointMismatch, "implausible block count");
  cfg.block_widths.clear();
  for (std::uint32_t b = 0; b < n_blocks; ++b) cfg.block_widths.push_back(static_cast<int>(r.get<std::uint32_t>()));
  const auto n_params = r.get<std::uint64_t>();

  if (is_cnn(ck.variant)) {
    if (use_vcdr != uses_vcdr(ck.variant) || cfg.in_channels != input_channels(ck.variant)) {
      throw Error(ErrorKind::CheckpointMismatch, "backbone header disagrees with variant");
    }
    Model model = [&] {
      try {
        return Model(cfg, use_vcdr);
      } catch (const Error& e) {
        throw Error(ErrorKind::CheckpointMismatch, e.what());
      }
    }();
    if (n_params != model.params().size()) throw Error(ErrorKind::CheckpointMismatch, "parameter count mismatch");
    for (auto& p : model.params()) p = r.get<double>();
    ck.cnn = std::move(model);
  } else {
    if (n_params != 2) throw Error(ErrorKind::CheckpointMismatch, "logistic checkpoint must hold 2 parameters");
    LogisticVcdrModel m;
    m.slope = r.get<double>();
    m.intercept = r.get<double>();
    ck.logistic = m;
  }
  if (!r.done()) throw Error(ErrorKind::CheckpointMismatch, "trailing bytes in checkpoint");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  const auto bytes = serialize_checkpoint(checkpoint);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_checkpoint(ss.str());
}

}  // namespace glaucofuse
