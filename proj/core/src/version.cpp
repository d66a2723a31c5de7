#include "fraclab/version.hpp"

#include <boost/version.hpp>
#include <Eigen/Core>
#include <fftw3.h>

#ifndef FRACLAB_VERSION
#define FRACLAB_VERSION "unknown"
#endif

namespace fraclab {

VersionInfo versions() {
    VersionInfo v;
    v.fraclab = FRACLAB_VERSION;
    v.eigen = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
              std::to_string(EIGEN_MINOR_VERSION);
    v.boost = std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
              std::to_string(BOOST_VERSION % 100);
    v.fftw = fftw_version;
#if defined(__clang__)
    v.compiler = "clang " __clang_version__;
#elif defined(__GNUC__)
    v.compiler = "gcc " __VERSION__;
#else
    v.compiler = "unknown";
#endif
    return v;
}

}  // namespace fraclab
