#ifndef MCDLAB_DIGEST_HPP
#define MCDLAB_DIGEST_HPP

#include <string>

namespace mcdlab {

// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

} // namespace mcdlab

#endif
