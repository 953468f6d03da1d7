#include "poisonmt/digest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "poisonmt/error.hpp"
#include "poisonmt/rng.hpp"

namespace poisonmt {

std::string digest_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash_bytes(bytes)));
    return std::string(buf);
}

std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return digest_hex(ss.str());
}

} // namespace poisonmt
