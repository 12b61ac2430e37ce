#include "pool/harness/checkpoint.hpp"

#include <map>

#include "pool/binio.hpp"

namespace pool::harness {
namespace {

constexpr std::uint32_t kMagic = 0x4b434c50;  // "PLCK"
constexpr std::uint32_t kVersion = 1;

void put_tables(ByteWriter& w, const TabularLearners& l) {
  w.u32(static_cast<std::uint32_t>(l.tables.size()));
  for (const auto& t : l.tables) {
    w.u32(static_cast<std::uint32_t>(t.n_actions()));
    w.f64(t.alpha());
    w.f64(t.gamma());
    w.u64(t.rows().size());
    for (const auto& [key, row] : t.rows()) {
      w.i64(key);
      w.f64s(row);
    }
  }
  w.u32(static_cast<std::uint32_t>(l.table_of_agent.size()));
  for (int i : l.table_of_agent) w.u32(static_cast<std::uint32_t>(i));
}

TabularLearners get_tables(ByteReader& r) {
  TabularLearners l;
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    const int n_actions = static_cast<int>(r.u32());
    if (n_actions <= 0 || n_actions > 4096) throw FormatError("q-table: bad action count");
    const double alpha = r.f64();
    const double gamma = r.f64();
    tabular::QTable t(n_actions, alpha, gamma);
    const std::uint64_t rows = r.u64();
    if (rows > r.remaining() / (8 * (n_actions + 1))) throw FormatError("q-table: row count exceeds data");
    std::vector<double> row(n_actions);
    for (std::uint64_t k = 0; k < rows; ++k) {
      const std::int64_t key = r.i64();
      r.f64s(row);
      t.set_row(key, row);
    }
    l.tables.push_back(std::move(t));
  }
  const std::uint32_t agents = r.u32();
  l.table_of_agent.resize(agents);
  for (int& i : l.table_of_agent) {
    i = static_cast<int>(r.u32());
    if (i >= static_cast<int>(l.tables.size())) throw FormatError("q-table: agent maps to a missing table");
  }
  return l;
}

void put_qnet(ByteWriter& w, const dqn::QNetwork& q) {
  q.processor().serialize(w);
  q.receptor().serialize(w);
}

dqn::QNetwork get_qnet(ByteReader& r) {
  auto processor = nn::DenseNet::deserialize(r);
  auto receptor = nn::DenseNet::deserialize(r);
  try {
    return dqn::QNetwork(std::move(processor), std::move(receptor));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("q-network: ") + e.what());
  }
}

void put_field(ByteWriter& w, const PheromoneField& f) {
  w.u32(static_cast<std::uint32_t>(f.grid_h()));
  w.u32(static_cast<std::uint32_t>(f.grid_w()));
  w.u32(static_cast<std::uint32_t>(f.n_actions()));
  w.u64(f.step_counter());
  w.f64s(f.values());
}

PheromoneField get_field(ByteReader& r) {
  const int h = static_cast<int>(r.u32());
  const int wd = static_cast<int>(r.u32());
  const int n = static_cast<int>(r.u32());
  if (h <= 0 || wd <= 0 || n <= 0 || static_cast<std::uint64_t>(h) * wd * n > r.remaining() / 8) {
    throw FormatError("field: bad dimensions");
  }
  PheromoneField f(h, wd, n);
  const std::uint64_t steps = r.u64();
  std::vector<double> values(static_cast<std::size_t>(h) * wd * n);
  r.f64s(values);
  try {
    f.assign(values, steps);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("field: ") + e.what());
  }
  return f;
}

template <class Fn>
void section(std::vector<std::pair<std::string, std::vector<std::uint8_t>>>& out, const std::string& tag, Fn fn) {
  ByteWriter w;
  fn(w);
  out.emplace_back(tag, w.take());
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck) {
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> s;
  section(s, "meta", [&](ByteWriter& w) {
    w.str(ck.config_text);
    w.u64(ck.seed);
    w.i64(ck.episodes_done);
    w.i64(ck.env_steps);
    w.i64(ck.grad_steps);
    w.i64(ck.best_episode);
  });
  if (ck.tables) section(s, "tables", [&](ByteWriter& w) { put_tables(w, *ck.tables); });
  if (ck.best_tables) section(s, "best_tables", [&](ByteWriter& w) { put_tables(w, *ck.best_tables); });
  if (ck.online) section(s, "online", [&](ByteWriter& w) { put_qnet(w, *ck.online); });
  if (ck.target) section(s, "target", [&](ByteWriter& w) { put_qnet(w, *ck.target); });
  if (ck.best) section(s, "best", [&](ByteWriter& w) { put_qnet(w, *ck.best); });
  if (ck.processor_opt) section(s, "processor_opt", [&](ByteWriter& w) { ck.processor_opt->serialize(w); });
  if (ck.receptor_opt) section(s, "receptor_opt", [&](ByteWriter& w) { ck.receptor_opt->serialize(w); });
  if (ck.buffer) {
    section(s, "buffer", [&](ByteWriter& w) {
      w.u64(ck.buffer->capacity);
      w.u64(ck.buffer->size);
      w.u64(ck.buffer->inserted);
    });
  }
  if (ck.field) section(s, "field", [&](ByteWriter& w) { put_field(w, *ck.field); });

  ByteWriter out;
  out.u32(kMagic);
  out.u32(kVersion);
  out.u32(static_cast<std::uint32_t>(s.size()));
  for (const auto& [tag, payload] : s) {
    out.str(tag);
    out.u64(payload.size());
    out.bytes(payload);
  }
  return out.take();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  if (in.u32() != kMagic) throw FormatError("checkpoint: bad magic");
  const std::uint32_t version = in.u32();
  if (version != kVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  const std::uint32_t count = in.u32();
  std::map<std::string, std::span<const std::uint8_t>> sections;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string tag = in.str();
    const std::uint64_t len = in.u64();
    if (len > in.remaining()) throw FormatError("checkpoint: section '" + tag + "' truncated");
    auto payload = in.bytes(static_cast<std::size_t>(len));
    if (!sections.emplace(tag, payload).second) throw FormatError("checkpoint: duplicate section '" + tag + "'");
  }
  if (!in.done()) throw FormatError("checkpoint: trailing bytes");

  Checkpoint ck;
  auto read = [&](const std::string& tag, auto fn) {
    auto it = sections.find(tag);
    if (it == sections.end()) return;
    ByteReader r(it->second);
    fn(r);
    if (!r.done()) throw FormatError("checkpoint: section '" + tag + "' has trailing bytes");
  };
  if (!sections.count("meta")) throw FormatError("checkpoint: missing meta section");
  read("meta", [&](ByteReader& r) {
    ck.config_text = r.str();
    ck.seed = r.u64();
    ck.episodes_done = r.i64();
    ck.env_steps = r.i64();
    ck.grad_steps = r.i64();
    ck.best_episode = static_cast<int>(r.i64());
  });
  read("tables", [&](ByteReader& r) { ck.tables = get_tables(r); });
  read("best_tables", [&](ByteReader& r) { ck.best_tables = get_tables(r); });
  read("online", [&](ByteReader& r) { ck.online = get_qnet(r); });
  read("target", [&](ByteReader& r) { ck.target = get_qnet(r); });
  read("best", [&](ByteReader& r) { ck.best = get_qnet(r); });
  read("processor_opt", [&](ByteReader& r) { ck.processor_opt = nn::Adam::deserialize(r); });
  read("receptor_opt", [&](ByteReader& r) { ck.receptor_opt = nn::Adam::deserialize(r); });
  read("buffer", [&](ByteReader& r) {
    BufferMeta b;
    b.capacity = r.u64();
    b.size = r.u64();
    b.inserted = r.u64();
    ck.buffer = b;
  });
  read("field", [&](ByteReader& r) { ck.field = get_field(r); });
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  write_file_bytes(path, encode_checkpoint(ck));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file_bytes(path)); }

void save_weights(const std::filesystem::path& path, const nn::DenseNet& net) {
  ByteWriter w;
  net.serialize(w);
  write_file_bytes(path, w.data());
}

nn::DenseNet load_weights(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  ByteReader r(bytes);
  auto net = nn::DenseNet::deserialize(r);
  if (!r.done()) throw FormatError("weights: trailing bytes");
  return net;
}

}  // namespace pool::harness
