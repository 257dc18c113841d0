#include "racestack/estimation/aggregate.hpp"

namespace rs::estimation {

CarStateEstimate StateAggregator::aggregate(double now) {
  const bool fresh = (now - pose_stamp_) <= cfg_.max_source_age &&
                     (now - vel_stamp_) <= cfg_.max_source_age;
  if (!fresh && have_output_) {
    last_.stale = true;
    return last_;
  }

  CarStateEstimate out;
  out.pose = pose_;
  out.v_x = v_x_;
  out.v_y = v_y_;
  out.yaw_rate = yaw_rate_;
  out.stale = !fresh;
  out.stamp = now;

  const auto fp = frame_.pose_to_frenet(out.pose, out.v_x, out.v_y, /*force=*/true);
  out.frenet = *fp;

  last_ = out;
  have_output_ = true;
  return out;
}

}  // namespace rs::estimation
