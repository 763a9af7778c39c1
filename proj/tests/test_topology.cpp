#include <doctest.h>

#include <cmath>

#include "skycast/topology.hpp"

using namespace skycast;

TEST_CASE("vehicles land inside the deployment rectangle") {
  RngStream rng = rng_stream("pos", 1);
  const Rect rect{100.0, 100.0};
  const NodeLayout layout = place_vehicles(21, rect, rng, 50.0);
  CHECK(layout.vehicle_positions.size() == 21);
  CHECK(layout.uav_height_m == 50.0);
  CHECK(layout.deployment_rect.width == 100.0);
  for (const Vec2& v : layout.vehicle_positions) {
    CHECK(v.x >= 0.0);
    CHECK(v.x < 100.0);
    CHECK(v.y >= 0.0);
    CHECK(v.y < 100.0);
  }
}

TEST_CASE("placement is reproducible per seed and varied across seeds") {
  RngStream a = rng_stream("pos", 5);
  RngStream b = rng_stream("pos", 5);
  RngStream c = rng_stream("pos", 6);
  const NodeLayout la = place_vehicles(10, Rect{}, a);
  const NodeLayout lb = place_vehicles(10, Rect{}, b);
  const NodeLayout lc = place_vehicles(10, Rect{}, c);
  bool same = true;
  bool different = false;
  for (int i = 0; i < 10; ++i) {
    same = same && la.vehicle_positions[i].x == lb.vehicle_positions[i].x &&
           la.vehicle_positions[i].y == lb.vehicle_positions[i].y;
    different = different || la.vehicle_positions[i].x != lc.vehicle_positions[i].x;
  }
  CHECK(same);
  CHECK(different);
}

TEST_CASE("a cell needs at least one vehicle") {
  RngStream rng = rng_stream("pos", 1);
  CHECK_THROWS_AS(place_vehicles(0, Rect{}, rng), InvalidCount);
  CHECK_THROWS_AS(place_vehicles(-3, Rect{}, rng), InvalidCount);
}

TEST_CASE("loss probability selects the direction's field") {
  LinkModel link;
  link.loss_prob_ul = 0.125;
  link.loss_prob_dl = 0.25;
  CHECK(loss_prob(link, Direction::Uplink) == 0.125);
  CHECK(loss_prob(link, Direction::Downlink) == 0.25);
}

TEST_CASE("degenerate loss probabilities are deterministic") {
  LinkModel link;
  link.loss_prob_ul = 0.0;
  link.loss_prob_dl = 1.0;
  RngStream rng = rng_stream("chan", 1);
  bool ul_all_delivered = true;
  bool dl_all_lost = true;
  for (int i = 0; i < 1000; ++i) {
    ul_all_delivered = ul_all_delivered &&
                       channel_draw(link, Direction::Uplink, rng) == DeliveryOutcome::Delivered;
    dl_all_lost =
        dl_all_lost && channel_draw(link, Direction::Downlink, rng) == DeliveryOutcome::Lost;
  }
  CHECK(ul_all_delivered);
  CHECK(dl_all_lost);
}

TEST_CASE("empirical loss rate tracks the configured probability") {
  LinkModel link;
  link.loss_prob_dl = 0.05;
  RngStream rng = rng_stream("chan", 9);
  const int draws = 100'000;
  int lost = 0;
  for (int i = 0; i < draws; ++i) {
    lost += channel_draw(link, Direction::Downlink, rng) == DeliveryOutcome::Lost ? 1 : 0;
  }
  const double p = 0.05;
  const double se = std::sqrt(p * (1 - p) / draws);
  CHECK(std::abs(static_cast<double>(lost) / draws - p) < 3 * se);
}
