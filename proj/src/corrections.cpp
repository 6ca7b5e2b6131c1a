#include "uwbfuse/corrections.hpp"

#include <cmath>
#include <string>

#include "uwbfuse/errors.hpp"

namespace uwbfuse {
namespace {

std::string station_label(int id) { return "station " + std::to_string(id); }

const PowerCurve& curve_of(const PowerCurveSet& curves, int id) {
  auto it = curves.find(id);
  if (it == curves.end()) throw ConfigError("no power curve for " + station_label(id));
  return it->second;
}

void require_ordered(double t1, double t2, double t3, const std::string& who) {
  if (!(t1 < t2 && t2 < t3)) {
    throw MalformedRecordError(who + ": timestamps are not strictly increasing");
  }
}

// Every station's 1 -> 3 interval must be within 50% of the reference's.
void require_window(double dt13, double dt13_reference, const std::string& who) {
  if (!(std::abs(dt13 - dt13_reference) <= 0.5 * dt13_reference)) {
    throw MalformedRecordError(who + ": 1->3 interval inconsistent with the reference window");
  }
}

void validate_two_message(const ExchangeRecord& r) {
  if (!(r.t1_r < r.t2_r) || !(r.t1_t < r.t2_t)) {
    throw MalformedRecordError("record " + std::to_string(r.round_idx) +
                               ": messages 1 and 2 out of order");
  }
}

void validate_three_message(const ExchangeRecord& r) {
  const std::string tag = "record " + std::to_string(r.round_idx);
  require_ordered(r.t1_r, r.t2_r, r.t3_r, tag + " reference");
  require_ordered(r.t1_t, r.t2_t, r.t3_t, tag + " tag");
  if (!(r.dt13_r() > 0.0)) throw MalformedRecordError(tag + ": empty reference window");
  require_window(r.dt13_t(), r.dt13_r(), tag + " tag");
}

double anchor_dt13(const ExchangeRecord& r, const AnchorTimestamps& a) {
  const std::string who = "record " + std::to_string(r.round_idx) + " anchor " +
                          std::to_string(a.id);
  if (!a.t3) throw MalformedRecordError(who + ": message 3 timestamp missing");
  require_ordered(a.t1, a.t2, *a.t3, who);
  require_window(*a.t3 - a.t1, r.dt13_r(), who);
  return *a.t3 - a.t1;
}

// Reference/tag side of a round: power errors and the tag's drift term.
struct TwrTerms {
  double e1;
  double e2;
  double c13_rt;
  double drift;  // tag response interval expressed in reference-clock excess
};

TwrTerms twr_terms(const ExchangeRecord& r, const PowerCurveSet& curves) {
  validate_three_message(r);
  TwrTerms t{};
  t.e1 = curve_of(curves, r.tag_id).error_from_measured(r.p1_t);
  t.e2 = curve_of(curves, r.reference_id).error_from_measured(r.p2_r);
  t.c13_rt = drift_error(r.dt13_r(), r.dt13_t());
  t.drift = interpolate_drift(t.c13_rt, r.dt13_t(), r.dt12_t() + t.e1);
  return t;
}

double toa_from_terms(const ExchangeRecord& r, const TwrTerms& t, const DelayCalibration& d) {
  return 0.5 * (r.dt12_r() - r.dt12_t() - t.drift - t.e2 - t.e1) - d.delay(r.reference_id) -
         d.delay(r.tag_id);
}

// Offset K with the three-message TOA substituted:
// 0.5 (dT12_T + drift) + 0.5 dT12_R - A + B + 0.5 (E1 - E2).
double offset_from_terms(const ExchangeRecord& r, const TwrTerms& t, const DelayCalibration& d) {
  return 0.5 * (r.dt12_t() + t.drift) + 0.5 * r.dt12_r() - d.delay(r.reference_id) +
         d.delay(r.tag_id) + 0.5 * (t.e1 - t.e2);
}

struct AnchorTerms {
  double e3;
  double e4;
  double c13;
  double tdoa;
};

AnchorTerms anchor_terms(const ExchangeRecord& r, const AnchorTimestamps& a,
                         const PowerCurveSet& curves, const TwrTerms& twr,
                         const DelayCalibration& d) {
  const double dt13_s = anchor_dt13(r, a);
  const PowerCurve& curve = curve_of(curves, a.id);
  AnchorTerms t{};
  t.e3 = curve.error_from_measured(a.p1);
  t.e4 = curve.error_from_measured(a.p2);
  t.c13 = drift_error(r.dt13_r(), dt13_s);
  const double drift = interpolate_drift(t.c13, dt13_s, a.dt12() + t.e3 - t.e4);
  // The anchor interval runs from the reference's emission to the tag's, so
  // the offset K is subtracted to leave the pure range-difference term.
  t.tdoa = drift + a.dt12() + t.e3 - t.e4 - offset_from_terms(r, twr, d);
  return t;
}

}  // namespace

double DelayCalibration::delay(int station_id) const {
  auto it = delays.find(station_id);
  if (it == delays.end()) throw ConfigError("no hardware delay for " + station_label(station_id));
  return it->second;
}

void DelayCalibration::validate() const {
  for (const auto& [id, d] : delays) {
    if (!(d >= 0.0)) throw ConfigError("negative hardware delay for " + station_label(id));
  }
}

SceneCalibration SceneCalibration::from_scene(const Scene& scene) {
  SceneCalibration cal;
  for (const auto& s : scene.stations) {
    cal.curves.emplace(s.id, s.power_curve);
    cal.delays.delays[s.id] = s.hardware_delay;
  }
  return cal;
}

const PowerCurve& SceneCalibration::curve(int station_id) const {
  return curve_of(curves, station_id);
}

std::optional<double> CorrectedMeasurement::tdoa(int anchor_id) const {
  auto it = anchors.find(anchor_id);
  if (it == anchors.end()) return std::nullopt;
  return it->second.t_tdoa;
}

double drift_error(double dt13_local, double dt13_remote) {
  if (!(dt13_local > 0.0) || !(dt13_remote > 0.0)) {
    throw MalformedRecordError("drift window must be positive");
  }
  return dt13_local - dt13_remote;
}

double interpolate_drift(double c, double dt13_tx, double dt12_elapsed) {
  if (!(dt13_tx > 0.0) || !(dt12_elapsed >= 0.0) || !(dt12_elapsed <= dt13_tx)) {
    throw MalformedRecordError("elapsed interval outside the drift window");
  }
  return c / dt13_tx * dt12_elapsed;
}

double toa_two_message(const ExchangeRecord& record, const PowerCurveSet& curves,
                       const DelayCalibration& delays) {
  validate_two_message(record);
  const double e1 = curve_of(curves, record.tag_id).error_from_measured(record.p1_t);
  const double e2 = curve_of(curves, record.reference_id).error_from_measured(record.p2_r);
  return 0.5 * (record.dt12_r() - record.dt12_t() - e2 - e1) - delays.delay(record.reference_id) -
         delays.delay(record.tag_id);
}

double toa_corrected(const ExchangeRecord& record, const PowerCurveSet& curves,
                     const DelayCalibration& delays) {
  return toa_from_terms(record, twr_terms(record, curves), delays);
}

double tdoa_with_offset(const AnchorTimestamps& anchor, const PowerCurveSet& curves) {
  if (!(anchor.t1 < anchor.t2)) {
    throw MalformedRecordError("anchor " + std::to_string(anchor.id) +
                               ": messages 1 and 2 out of order");
  }
  const PowerCurve& curve = curve_of(curves, anchor.id);
  return anchor.dt12() + curve.error_from_measured(anchor.p1) -
         curve.error_from_measured(anchor.p2);
}

double anchor_drift_error(const ExchangeRecord& record, int anchor_id) {
  const AnchorTimestamps& a = record.anchor(anchor_id);
  return drift_error(record.dt13_r(), anchor_dt13(record, a));
}

double offset_k(const ExchangeRecord& record, const PowerCurveSet& curves,
                const DelayCalibration& delays, double t_toa) {
  const TwrTerms t = twr_terms(record, curves);
  return t_toa + record.dt12_t() + t.drift + t.e1 + 2.0 * delays.delay(record.tag_id);
}

double tdoa_corrected(const ExchangeRecord& record, int anchor_id, const PowerCurveSet& curves,
                      const DelayCalibration& delays) {
  const TwrTerms twr = twr_terms(record, curves);
  const AnchorTimestamps& a = record.anchor(anchor_id);
  try {
    return anchor_terms(record, a, curves, twr, delays).tdoa;
  } catch (const DomainError& e) {
    throw DomainError("anchor " + std::to_string(anchor_id) + ": " + e.what(), e.value());
  }
}

CorrectedMeasurement correct_record(const ExchangeRecord& record,
                                    const SceneCalibration& calibration) {
  const TwrTerms twr = twr_terms(record, calibration.curves);

  CorrectedMeasurement out;
  out.round_idx = record.round_idx;
  out.reference_id = record.reference_id;
  out.tag_id = record.tag_id;
  out.t_toa = toa_from_terms(record, twr, calibration.delays);
  out.toa_negative = out.t_toa < 0.0;
  out.c13_rt = twr.c13_rt;
  out.e1 = twr.e1;
  out.e2 = twr.e2;
  out.k = out.t_toa + record.dt12_t() + twr.drift + twr.e1 +
          2.0 * calibration.delays.delay(record.tag_id);

  for (const auto& a : record.anchors) {
    AnchorCorrection ac;
    try {
      const AnchorTerms t = anchor_terms(record, a, calibration.curves, twr, calibration.delays);
      ac.t_tdoa = t.tdoa;
      ac.c13 = t.c13;
      ac.e3 = t.e3;
      ac.e4 = t.e4;
    } catch (const Error& e) {
      ac.t_tdoa.reset();
      ac.error = e.what();
    }
    out.anchors.emplace(a.id, std::move(ac));
  }
  return out;
}

}  // namespace uwbfuse
