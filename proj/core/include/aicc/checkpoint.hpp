#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace aicc {

struct TensorRecord {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> data;
};

/// Named tensors plus string metadata, serialized as a text manifest followed
/// by the tensor payloads as little-endian IEEE-754 doubles in manifest order.
///
///   aicc-params
///   schema_version 1
///   meta <key> <value>
///   tensor <name> <rank> <dim>...
///   end
///   <binary payload>
///
/// Names and meta keys contain no whitespace; meta values run to end of line.
class ParamArchive {
 public:
  static constexpr int kSchemaVersion = 1;

  void set_meta(const std::string& key, std::string value);
  bool has_meta(const std::string& key) const;
  /// Throws FormatError when missing.
  const std::string& meta(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& all_meta() const noexcept {
    return meta_;
  }

  void add_tensor(std::string name, std::vector<std::size_t> shape, std::vector<double> data);
  bool has_tensor(const std::string& name) const;
  /// Throws FormatError when missing.
  const TensorRecord& tensor(const std::string& name) const;
  const std::vector<TensorRecord>& tensors() const noexcept { return tensors_; }

  void write(std::ostream& out) const;
  static ParamArchive read(std::istream& in);

  void save(const std::filesystem::path& path) const;
  static ParamArchive load(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<TensorRecord> tensors_;
};

}  // namespace aicc
