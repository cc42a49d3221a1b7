#include "fss/output.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fss/errors.hpp"

namespace fss {

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

std::string pgm_image(std::size_t width, std::size_t height,
                      const std::vector<int>& pixels,
                      const std::string& comment) {
  if (pixels.size() != width * height) {
    throw Error("pixel buffer does not match image size");
  }
  std::string out = "P2\n";
  if (!comment.empty()) out += "# " + comment + "\n";
  out += std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      if (x) out += ' ';
      out += std::to_string(pixels[y * width + x]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace fss
