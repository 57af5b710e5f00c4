// boxdet/errors.hpp
//
// Error types thrown across the library.

#pragma once

#include <stdexcept>
#include <string>

namespace boxdet {

struct SingularChannel : std::runtime_error {
    explicit SingularChannel(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedOrder : std::runtime_error {
    explicit UnsupportedOrder(const std::string& what) : std::runtime_error(what) {}
};

struct BoxLargerThanConstellation : std::runtime_error {
    explicit BoxLargerThanConstellation(const std::string& what) : std::runtime_error(what) {}
};

struct NotAConstellationPoint : std::runtime_error {
    explicit NotAConstellationPoint(const std::string& what) : std::runtime_error(what) {}
};

struct SearchSpaceTooLarge : std::runtime_error {
    explicit SearchSpaceTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct NotBracketed : std::runtime_error {
    explicit NotBracketed(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedDetector : std::runtime_error {
    explicit UnsupportedDetector(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace boxdet
