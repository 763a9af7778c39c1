#include "skycast/topology.hpp"

namespace skycast {

NodeLayout place_vehicles(int count, Rect rect, RngStream& rng, double uav_height_m) {
  if (count < 1) {
    throw InvalidCount("vehicle count must be at least 1, got " + std::to_string(count));
  }
  NodeLayout layout;
  layout.uav_height_m = uav_height_m;
  layout.deployment_rect = rect;
  layout.vehicle_positions.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double x = rng.uniform(0.0, rect.width);
    const double y = rng.uniform(0.0, rect.height);
    layout.vehicle_positions.push_back(Vec2{x, y});
  }
  return layout;
}

double loss_prob(const LinkModel& link, Direction dir) {
  return dir == Direction::Uplink ? link.loss_prob_ul : link.loss_prob_dl;
}

DeliveryOutcome channel_draw(const LinkModel& link, Direction dir, RngStream& rng) {
  return rng.bernoulli(loss_prob(link, dir)) ? DeliveryOutcome::Lost : DeliveryOutcome::Delivered;
}

}  // namespace skycast
