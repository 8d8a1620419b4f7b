#include "sbiwss/wss_profile.hpp"

#include <cmath>
#include <ostream>

namespace sbiwss {

const char* wss_method_name(WssMethod method) {
  switch (method) {
    case WssMethod::Truth: return "truth";
    case WssMethod::Mri: return "mri";
    case WssMethod::Sbi: return "sbi";
  }
  return "unknown";
}

WssProfile profile_from_wall_samples(const std::vector<WallSample>& samples,
                                     WallSide side, WssMethod method) {
  WssProfile p;
  p.method = method;
  p.side = side;
  p.s.reserve(samples.size());
  p.point.reserve(samples.size());
  p.normal.reserve(samples.size());
  p.wss.reserve(samples.size());
  for (const WallSample& ws : samples) {
    p.s.push_back(ws.s);
    p.point.push_back(ws.point);
    p.normal.push_back(ws.normal);
    p.wss.push_back(std::abs(ws.wss_full));
  }
  return p;
}

void export_wss_csv(std::ostream& out, const WssProfile& profile) {
  out << "s,x,y,nx,ny,wss,method\n";
  const char* name = wss_method_name(profile.method);
  out.precision(12);
  for (int k = 0; k < profile.size(); ++k)
    out << profile.s[k] << ',' << profile.point[k][0] << ','
        << profile.point[k][1] << ',' << profile.normal[k][0] << ','
        << profile.normal[k][1] << ',' << profile.wss[k] << ',' << name << '\n';
}

}  // namespace sbiwss
