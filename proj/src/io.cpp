#include "sbd/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "sbd/errors.hpp"

namespace sbd {

static_assert(std::endian::native == std::endian::little, "binary matrix format assumes a little-endian host");

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorCode::IoError, "cannot create directory " + dir.string() + ": " + ec.message());
  std::random_device rd;
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out.good()) {
      fs::remove(tmp, ec);
      fail(ErrorCode::IoError, "write failed for " + path.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    fail(ErrorCode::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out = "# " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

namespace {

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorCode::IoError,
          "malformed number '" + std::string(s) + "'");
  return v;
}

}  // namespace

Eigen::MatrixXd matrix_from_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
  }
  require(!lines.empty() && lines[0].starts_with("#"), ErrorCode::IoError, "CSV matrix needs a '# rows cols' header");
  long long rows = -1, cols = -1;
  {
    std::istringstream hs{std::string(lines[0].substr(1))};
    hs >> rows >> cols;
    require(!hs.fail() && rows >= 0 && cols >= 0, ErrorCode::IoError, "malformed CSV header");
  }
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index r = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    std::string_view line = lines[li];
    if (line.empty() || line == "\r") continue;
    require(r < rows, ErrorCode::IoError, "CSV has more rows than its header declares");
    Eigen::Index c = 0;
    while (true) {
      const auto comma = line.find(',');
      require(c < cols, ErrorCode::IoError, "CSV row " + std::to_string(r) + " has too many columns");
      m(r, c++) = parse_double(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    require(c == cols, ErrorCode::IoError, "CSV row " + std::to_string(r) + " has too few columns");
    ++r;
  }
  require(r == rows, ErrorCode::IoError, "CSV has fewer rows than its header declares");
  return m;
}

std::string matrix_to_binary(const Eigen::MatrixXd& m) {
  std::string out(4 + 16 + 8 * static_cast<std::size_t>(m.size()), '\0');
  std::memcpy(out.data(), "SBD1", 4);
  const std::uint64_t dims[2] = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  std::memcpy(out.data() + 4, dims, 16);
  if (m.size()) std::memcpy(out.data() + 20, m.data(), 8 * static_cast<std::size_t>(m.size()));
  return out;
}

Eigen::MatrixXd matrix_from_binary(std::string_view bytes) {
  require(bytes.size() >= 20 && bytes.substr(0, 4) == "SBD1", ErrorCode::IoError, "not an SBD1 matrix file");
  std::uint64_t dims[2];
  std::memcpy(dims, bytes.data() + 4, 16);
  require(dims[0] < (1ull << 32) && dims[1] < (1ull << 32), ErrorCode::IoError, "SBD1 dimensions out of range");
  const std::uint64_t count = dims[0] * dims[1];
  require(bytes.size() == 20 + 8 * count, ErrorCode::IoError, "SBD1 payload size does not match its dimensions");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
  if (count) std::memcpy(m.data(), bytes.data() + 20, 8 * count);
  return m;
}

void write_matrix(const fs::path& path, const Eigen::MatrixXd& m) {
  write_file_atomic(path, path.extension() == ".bin" ? matrix_to_binary(m) : matrix_to_csv(m));
}

Eigen::MatrixXd read_matrix(const fs::path& path) {
  const std::string bytes = read_file(path);
  return path.extension() == ".bin" ? matrix_from_binary(bytes) : matrix_from_csv(bytes);
}

}  // namespace sbd
