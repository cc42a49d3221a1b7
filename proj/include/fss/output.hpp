#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fss {

inline constexpr const char* kToolVersion = "0.1.0";

// Shortest decimal that round-trips the value ("nan"/"inf" spelled out).
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

std::string read_text_file(const std::string& path);  // throws Error
void write_text_file(const std::string& path, const std::string& content);

// P2 (plain) PGM, maxval 255, one comment line after the magic. Pixels are
// row-major, row 0 at the domain min corner.
std::string pgm_image(std::size_t width, std::size_t height,
                      const std::vector<int>& pixels,
                      const std::string& comment);

}  // namespace fss
