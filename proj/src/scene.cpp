#include "uwbfuse/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "uwbfuse/errors.hpp"
#include "uwbfuse/exchange_record.hpp"

namespace uwbfuse {

void NoiseSpec::validate() const {
  if (!(timestamp_jitter_sigma >= 0.0) || !(power_jitter_sigma >= 0.0) ||
      !(frequency_jitter_sigma >= 0.0)) {
    throw ConfigError("noise sigmas must be non-negative");
  }
  for (const auto& [id, sigma] : station_timestamp_jitter) {
    if (!(sigma >= 0.0)) throw ConfigError("noise sigmas must be non-negative");
  }
}

void Scene::validate() const {
  std::set<int> ids;
  int n_reference = 0;
  int n_tag = 0;
  for (const auto& s : stations) {
    s.validate();
    if (!ids.insert(s.id).second) {
      throw ConfigError("duplicate station id " + std::to_string(s.id));
    }
    n_reference += s.role == Role::Reference;
    n_tag += s.role == Role::Tag;
  }
  if (n_reference != 1 || n_tag != 1) {
    throw ConfigError("scene needs exactly one reference and one tag");
  }
  noise.validate();
  for (const auto& [id, sigma] : noise.station_timestamp_jitter) {
    if (!ids.count(id)) throw ConfigError("jitter override for unknown station " + std::to_string(id));
  }

  double max_tof = 0.0;
  double max_delay = 0.0;
  for (const auto& a : stations) {
    max_delay = std::max(max_delay, a.hardware_delay);
    for (const auto& b : stations) max_tof = std::max(max_tof, true_tof(a.position, b.position));
  }
  if (!(round_interval > 2.0 * max_tof)) {
    throw ConfigError("round_interval must exceed twice the largest time of flight");
  }
  if (!(tag_response_delay > 0.0)) {
    throw ConfigError("tag_response_delay must be positive");
  }
  // Message 2 has to reach every station before message 3 is sent.
  if (!(tag_response_delay + 4.0 * (max_tof + max_delay) < round_interval)) {
    throw ConfigError("tag_response_delay leaves no room for message 3 within round_interval");
  }
  if (!(round_spacing >= round_interval)) {
    throw ConfigError("round_spacing must be at least round_interval");
  }
  if (!(radio.center_frequency_hz > 0.0) || !std::isfinite(tx_power_dbm)) {
    throw ConfigError("radio settings must be finite and positive");
  }
}

const Station& Scene::station(int id) const {
  auto it = std::find_if(stations.begin(), stations.end(),
                         [id](const Station& s) { return s.id == id; });
  if (it == stations.end()) throw ConfigError("no station with id " + std::to_string(id));
  return *it;
}

bool Scene::has_station(int id) const {
  return std::any_of(stations.begin(), stations.end(),
                     [id](const Station& s) { return s.id == id; });
}

const Station& Scene::reference() const {
  auto it = std::find_if(stations.begin(), stations.end(),
                         [](const Station& s) { return s.role == Role::Reference; });
  if (it == stations.end()) throw ConfigError("scene has no reference station");
  return *it;
}

const Station& Scene::tag() const {
  auto it = std::find_if(stations.begin(), stations.end(),
                         [](const Station& s) { return s.role == Role::Tag; });
  if (it == stations.end()) throw ConfigError("scene has no tag");
  return *it;
}

std::vector<int> Scene::anchor_ids() const {
  std::vector<int> ids;
  for (const auto& s : stations) {
    if (s.role == Role::Anchor) ids.push_back(s.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

Scene Scene::with_reference(int id) const {
  if (station(id).role == Role::Tag) {
    throw ConfigError("the tag cannot act as reference");
  }
  Scene out = *this;
  for (auto& s : out.stations) {
    if (s.role == Role::Reference) s.role = Role::Anchor;
  }
  for (auto& s : out.stations) {
    if (s.id == id) s.role = Role::Reference;
  }
  return out;
}

const AnchorTimestamps& ExchangeRecord::anchor(int id) const {
  auto it = std::find_if(anchors.begin(), anchors.end(),
                         [id](const AnchorTimestamps& a) { return a.id == id; });
  if (it == anchors.end()) {
    throw MalformedRecordError("record has no timestamps for anchor " + std::to_string(id));
  }
  return *it;
}

}  // namespace uwbfuse
