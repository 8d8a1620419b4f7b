#ifndef SBIWSS_METRICS_HPP
#define SBIWSS_METRICS_HPP

//! Accuracy of a reconstructed wall shear profile against the truth profile,
//! as a relative L2 error along the comparison wall segment.

#include <vector>

#include "sbiwss/geometry.hpp"
#include "sbiwss/voxels.hpp"
#include "sbiwss/wss_profile.hpp"

namespace sbiwss {

// Arc-length-uniform stations on one wall, restricted to the scan region's
// x extent.  Every reconstruction route is evaluated at these same stations.
GammaSamples build_gamma(const ChannelSpec& spec, const ScanRegion& region,
                         int count = 200, WallSide side = WallSide::Top);

// 100 * ||ref - test||_L2(Gamma) / ||ref||_L2(Gamma).  Profiles must share
// their stations; values are interpolated piecewise-cubically between
// stations and integrated with a per-panel Gauss rule of the given order.
double relative_l2_error(const WssProfile& ref, const WssProfile& test,
                         int quad_order = 5);

struct ErrorReport {
  double e_sbi = 0.0;  // percent
  double e_mri = 0.0;  // percent
  std::vector<double> abs_err_sbi;  // per station, Pa
  std::vector<double> abs_err_mri;
  WallSide side = WallSide::Top;
  double s_begin = 0.0, s_end = 0.0;
  int quad_order = 5;
};

ErrorReport make_error_report(const WssProfile& truth, const WssProfile& sbi,
                              const WssProfile& mri, int quad_order = 5);

}  // namespace sbiwss

#endif
