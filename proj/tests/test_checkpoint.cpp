#include <doctest.h>

#include <bit>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <sstream>

#include "aicc/checkpoint.hpp"
#include "aicc/errors.hpp"

using aicc::ParamArchive;

TEST_CASE("archive round trip preserves bits") {
  ParamArchive a;
  a.set_meta("model.name", "tiny net");
  a.set_meta("layers", "3,4");
  a.add_tensor("w", {2, 3}, {1.0, -0.0, 1e-300, std::numeric_limits<double>::max(), 0.1, -7.25});
  a.add_tensor("b", {1}, {std::numeric_limits<double>::denorm_min()});

  std::stringstream buf;
  a.write(buf);
  const ParamArchive b = ParamArchive::read(buf);
  CHECK(b.meta("model.name") == "tiny net");
  CHECK(b.meta("layers") == "3,4");
  REQUIRE(b.tensors().size() == 2);
  CHECK(b.tensors()[0].name == "w");
  CHECK(b.tensor("w").shape == std::vector<std::size_t>{2, 3});
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::bit_cast<std::uint64_t>(b.tensor("w").data[i]) ==
          std::bit_cast<std::uint64_t>(a.tensor("w").data[i]));
  }
  CHECK(b.tensor("b").data[0] == std::numeric_limits<double>::denorm_min());
}

TEST_CASE("manifest layout and little-endian payload") {
  ParamArchive a;
  a.set_meta("k", "v");
  a.add_tensor("x", {1}, {1.0});
  std::stringstream buf;
  a.write(buf);
  const std::string bytes = buf.str();
  const std::string header = "aicc-params\nschema_version 1\nmeta k v\ntensor x 1 1\nend\n";
  REQUIRE(bytes.size() == header.size() + 8);
  CHECK(bytes.substr(0, header.size()) == header);
  // 1.0 = 0x3FF0000000000000, least significant byte first.
  const std::string payload = bytes.substr(header.size());
  CHECK(static_cast<unsigned char>(payload[6]) == 0xF0);
  CHECK(static_cast<unsigned char>(payload[7]) == 0x3F);
  for (int i = 0; i < 6; ++i) CHECK(payload[i] == 0);
}

TEST_CASE("archive file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "aicc_checkpoint_test.aicc";
  ParamArchive a;
  a.add_tensor("t", {2, 2}, {1, 2, 3, 4});
  a.save(path);
  CHECK(ParamArchive::load(path).tensor("t").data == std::vector<double>{1, 2, 3, 4});
  std::filesystem::remove(path);
  CHECK_THROWS_AS(ParamArchive::load(path), aicc::FormatError);
}

TEST_CASE("malformed archives are rejected") {
  auto read = [](const std::string& s) {
    std::stringstream in(s);
    return ParamArchive::read(in);
  };
  CHECK_THROWS_AS(read("not-a-checkpoint\n"), aicc::FormatError);
  CHECK_THROWS_AS(read("aicc-params\nschema_version 2\nend\n"), aicc::FormatError);
  CHECK_THROWS_AS(read("aicc-params\nschema_version 1\ntensor x 1 2\n"), aicc::FormatError);
  CHECK_THROWS_AS(read("aicc-params\nschema_version 1\ntensor x 1 2\nend\n1234"),
                  aicc::FormatError);
  CHECK_THROWS_AS(read("aicc-params\nschema_version 1\nbogus\nend\n"), aicc::FormatError);

  ParamArchive a;
  CHECK_THROWS_AS(a.add_tensor("x", {2, 2}, {1.0}), aicc::FormatError);
  CHECK_THROWS_AS(a.add_tensor("has space", {1}, {1.0}), aicc::FormatError);
  a.add_tensor("x", {1}, {1.0});
  CHECK_THROWS_AS(a.add_tensor("x", {1}, {1.0}), aicc::FormatError);
  CHECK_THROWS_AS(a.set_meta("key", "two\nlines"), aicc::FormatError);
  CHECK_THROWS_AS(a.meta("absent"), aicc::FormatError);
  CHECK_THROWS_AS(a.tensor("absent"), aicc::FormatError);
}
