#pragma once

#include <stdexcept>
#include <vector>

#include "skycast/engine.hpp"

namespace skycast {

struct Vec2 {
  double x = 0;
  double y = 0;
};

struct Rect {
  double width = 100.0;
  double height = 100.0;
};

/// Static geometry of one cell: a base station at the origin, a hovering UAV
/// above the centre of the deployment rectangle, and n parked vehicles drawn
/// uniformly inside it. Positions are bookkeeping only; the abstract channel
/// below does not modulate rate or loss with distance.
struct NodeLayout {
  double uav_height_m = 50.0;
  Vec2 bs_position{0.0, 0.0};
  Rect deployment_rect;
  std::vector<Vec2> vehicle_positions;
};

enum class Direction : std::uint8_t { Uplink, Downlink };

/// Abstract radio capacity and loss. Rates are the throughput a direction
/// achieves while it holds transmission symbols; per-packet loss is an
/// independent Bernoulli draw applied when a packet leaves the air interface
/// (no retransmission, a lost packet is final).
struct LinkModel {
  double uplink_rate_bps = 360e6;
  double downlink_rate_bps = 800e6;
  double loss_prob_ul = 1.0e-4;
  double loss_prob_dl = 2.5e-3;
};

enum class DeliveryOutcome : std::uint8_t { Delivered, Lost };

class InvalidCount : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

NodeLayout place_vehicles(int count, Rect rect, RngStream& rng, double uav_height_m = 50.0);

double loss_prob(const LinkModel& link, Direction dir);

DeliveryOutcome channel_draw(const LinkModel& link, Direction dir, RngStream& rng);

}  // namespace skycast
