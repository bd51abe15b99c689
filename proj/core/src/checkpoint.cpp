#include "aicc/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "aicc/errors.hpp"

namespace aicc {

namespace {

constexpr const char* kMagic = "aicc-params";

bool has_space(const std::string& s) {
  return s.empty() || std::any_of(s.begin(), s.end(), [](unsigned char c) {
           return std::isspace(c) != 0;
         });
}

std::size_t element_count(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

void write_le(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(bytes, 8);
}

double read_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw FormatError("checkpoint payload truncated");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void ParamArchive::set_meta(const std::string& key, std::string value) {
  if (has_space(key)) throw FormatError("meta key must be non-empty without whitespace");
  if (value.find('\n') != std::string::npos) throw FormatError("meta value contains newline");
  for (auto& [k, v] : meta_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  meta_.emplace_back(key, std::move(value));
}

bool ParamArchive::has_meta(const std::string& key) const {
  return std::any_of(meta_.begin(), meta_.end(), [&](const auto& kv) { return kv.first == key; });
}

const std::string& ParamArchive::meta(const std::string& key) const {
  for (const auto& [k, v] : meta_)
    if (k == key) return v;
  throw FormatError("checkpoint is missing meta key '" + key + "'");
}

void ParamArchive::add_tensor(std::string name, std::vector<std::size_t> shape,
                              std::vector<double> data) {
  if (has_space(name)) throw FormatError("tensor name must be non-empty without whitespace");
  if (has_tensor(name)) throw FormatError("duplicate tensor '" + name + "'");
  if (element_count(shape) != data.size()) {
    throw FormatError("tensor '" + name + "' data does not match its shape");
  }
  tensors_.push_back({std::move(name), std::move(shape), std::move(data)});
}

bool ParamArchive::has_tensor(const std::string& name) const {
  return std::any_of(tensors_.begin(), tensors_.end(),
                     [&](const TensorRecord& t) { return t.name == name; });
}

const TensorRecord& ParamArchive::tensor(const std::string& name) const {
  for (const auto& t : tensors_)
    if (t.name == name) return t;
  throw FormatError("checkpoint is missing tensor '" + name + "'");
}

void ParamArchive::write(std::ostream& out) const {
  out << kMagic << '\n' << "schema_version " << kSchemaVersion << '\n';
  for (const auto& [k, v] : meta_) out << "meta " << k << ' ' << v << '\n';
  for (const auto& t : tensors_) {
    out << "tensor " << t.name << ' ' << t.shape.size();
    for (std::size_t d : t.shape) out << ' ' << d;
    out << '\n';
  }
  out << "end\n";
  for (const auto& t : tensors_)
    for (double v : t.data) write_le(out, v);
  if (!out) throw FormatError("failed writing checkpoint");
}

ParamArchive ParamArchive::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw FormatError("not an aicc checkpoint");
  if (!std::getline(in, line)) throw FormatError("checkpoint manifest truncated");
  {
    std::istringstream ls(line);
    std::string word;
    int version = 0;
    if (!(ls >> word >> version) || word != "schema_version") {
      throw FormatError("checkpoint manifest lacks schema_version");
    }
    if (version != kSchemaVersion) {
      throw FormatError("unsupported checkpoint schema version " + std::to_string(version));
    }
  }

  ParamArchive archive;
  std::vector<std::pair<std::string, std::vector<std::size_t>>> layout;
  bool ended = false;
  while (std::getline(in, line)) {
    if (line == "end") {
      ended = true;
      break;
    }
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "meta") {
      std::string key;
      ls >> key;
      std::string value;
      std::getline(ls, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      archive.set_meta(key, value);
    } else if (kind == "tensor") {
      std::string name;
      std::size_t rank = 0;
      if (!(ls >> name >> rank)) throw FormatError("bad tensor line: " + line);
      std::vector<std::size_t> shape(rank);
      for (auto& d : shape)
        if (!(ls >> d)) throw FormatError("bad tensor shape: " + line);
      layout.emplace_back(std::move(name), std::move(shape));
    } else {
      throw FormatError("unexpected manifest line: " + line);
    }
  }
  if (!ended) throw FormatError("checkpoint manifest has no 'end' line");

  for (auto& [name, shape] : layout) {
    std::vector<double> data(element_count(shape));
    for (double& v : data) v = read_le(in);
    archive.add_tensor(std::move(name), std::move(shape), std::move(data));
  }
  return archive;
}

void ParamArchive::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write(out);
}

ParamArchive ParamArchive::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read(in);
}

}  // namespace aicc
