#pragma once

#include <string>
#include <string_view>

namespace poisonmt {

// FNV-1a 64 of the given bytes, as 16 lowercase hex digits.
std::string digest_hex(std::string_view bytes);
std::string digest_file(const std::string& path);

} // namespace poisonmt
