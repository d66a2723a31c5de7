#pragma once

#include <string>

namespace fraclab {

struct VersionInfo {
    std::string fraclab;
    std::string eigen;
    std::string boost;
    std::string fftw;
    std::string compiler;
};

VersionInfo versions();

}  // namespace fraclab
