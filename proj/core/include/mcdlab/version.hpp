#ifndef MCDLAB_VERSION_HPP
#define MCDLAB_VERSION_HPP

namespace mcdlab {

inline constexpr const char* version_string = "0.1.0";

}

#endif
