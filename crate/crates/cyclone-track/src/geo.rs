//! Geographic tracks: tangent-plane conversion, CSV ingestion and
//! forecast-error metrics.
//!
//! The projection is the equirectangular tangent plane, which matches the
//! constant-Coriolis flat-plane approximation used by the dynamics and
//! keeps the fitting equations exactly linear in plane coordinates. Its
//! distortion is acceptable at the sub-1000 km scales of fitting windows.

use crate::error::{Error, Result};
use crate::fitting::{FitResult, PlanePoint};

/// Mean Earth radius, m.
pub const EARTH_RADIUS: f64 = 6_371_000.0;

/// Normalize a longitude to `(-180, 180]`.
pub fn normalize_lon(lon: f64) -> f64 {
    let mut x = (lon + 180.0).rem_euclid(360.0);
    if x == 0.0 {
        x = 360.0;
    }
    x - 180.0
}

/// Project a geographic point onto the tangent plane at `origin`:
/// `x = R cos(lat0) dlon, y = R dlat` (east, north), meters.
pub fn project(point: (f64, f64), origin: (f64, f64)) -> Result<[f64; 2]> {
    for lat in [point.0, origin.0] {
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::Domain(format!(
                "latitude must lie in [-90, 90], got {lat}"
            )));
        }
    }
    let dlat = (point.0 - origin.0).to_radians();
    let dlon = normalize_lon(point.1 - origin.1).to_radians();
    Ok([
        EARTH_RADIUS * origin.0.to_radians().cos() * dlon,
        EARTH_RADIUS * dlat,
    ])
}

/// Inverse of [`project`] on its image.
pub fn unproject(xy: [f64; 2], origin: (f64, f64)) -> Result<(f64, f64)> {
    if !(-90.0..=90.0).contains(&origin.0) {
        return Err(Error::Domain(format!(
            "origin latitude must lie in [-90, 90], got {}",
            origin.0
        )));
    }
    let lat = origin.0 + (xy[1] / EARTH_RADIUS).to_degrees();
    if !(-90.0..=90.0).contains(&lat) {
        return Err(Error::OutOfPlane(format!(
            "northward offset {} m pushes the latitude to {lat}",
            xy[1]
        )));
    }
    let coslat0 = origin.0.to_radians().cos();
    let lon = origin.1 + (xy[0] / (EARTH_RADIUS * coslat0)).to_degrees();
    Ok((lat, normalize_lon(lon)))
}

/// Great-circle distance between two geographic points on the mean
/// sphere, meters.
pub fn haversine(p: (f64, f64), q: (f64, f64)) -> f64 {
    let (lat1, lon1) = (p.0.to_radians(), p.1.to_radians());
    let (lat2, lon2) = (q.0.to_radians(), q.1.to_radians());
    let sdlat = ((lat2 - lat1) / 2.0).sin();
    let sdlon = ((lon2 - lon1) / 2.0).sin();
    let h = sdlat * sdlat + lat1.cos() * lat2.cos() * sdlon * sdlon;
    2.0 * EARTH_RADIUS * h.sqrt().min(1.0).asin()
}

/// One observed eye position.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrackPoint {
    /// Seconds since the first track point.
    pub t: f64,
    /// Latitude, degrees.
    pub lat: f64,
    /// Longitude, degrees, normalized to `(-180, 180]`.
    pub lon: f64,
    /// Optional row label.
    pub label: Option<String>,
}

/// A time-ordered sequence of geographic eye positions.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Track {
    /// Geographic coordinates of the first point.
    pub origin: (f64, f64),
    /// Points in strictly increasing time order.
    pub points: Vec<TrackPoint>,
}

impl Track {
    /// Build a track from `(t_seconds, lat, lon)` triples, validating the
    /// ordering and coordinate ranges.
    pub fn new(points: Vec<(f64, f64, f64)>) -> Result<Self> {
        let rows: Vec<TrackPoint> = points
            .into_iter()
            .map(|(t, lat, lon)| TrackPoint {
                t,
                lat,
                lon: normalize_lon(lon),
                label: None,
            })
            .collect();
        Self::from_points(rows)
    }

    fn from_points(points: Vec<TrackPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("a track needs at least one point".into()));
        }
        for (i, p) in points.iter().enumerate() {
            let line = i + 2; // 1-based, after the header
            if !p.t.is_finite() || !p.lat.is_finite() || !p.lon.is_finite() {
                return Err(Error::InvalidTrack {
                    line,
                    msg: "non-finite value".into(),
                });
            }
            if !(-90.0..=90.0).contains(&p.lat) {
                return Err(Error::InvalidTrack {
                    line,
                    msg: format!("latitude {} out of [-90, 90]", p.lat),
                });
            }
            if i > 0 && p.t <= points[i - 1].t {
                return Err(Error::InvalidTrack {
                    line,
                    msg: format!(
                        "time {} h does not increase past {} h",
                        p.t / 3600.0,
                        points[i - 1].t / 3600.0
                    ),
                });
            }
        }
        let origin = (points[0].lat, points[0].lon);
        Ok(Self { origin, points })
    }

    /// Time span `(first, last)` in seconds.
    pub fn time_range(&self) -> (f64, f64) {
        (
            self.points.first().map(|p| p.t).unwrap_or(0.0),
            self.points.last().map(|p| p.t).unwrap_or(0.0),
        )
    }

    /// Linear interpolation of the position at time `t`, or `None`
    /// outside the track's span.
    pub fn interpolate(&self, t: f64) -> Option<(f64, f64)> {
        let pts = &self.points;
        if pts.is_empty() || t < pts[0].t || t > pts[pts.len() - 1].t {
            return None;
        }
        let idx = pts.partition_point(|p| p.t <= t);
        if idx == 0 {
            return Some((pts[0].lat, pts[0].lon));
        }
        if idx >= pts.len() {
            let last = &pts[pts.len() - 1];
            return Some((last.lat, last.lon));
        }
        let (a, b) = (&pts[idx - 1], &pts[idx]);
        let w = (t - a.t) / (b.t - a.t);
        Some((
            a.lat + w * (b.lat - a.lat),
            a.lon + w * normalize_lon(b.lon - a.lon),
        ))
    }
}

/// Parse a track from CSV text with header
/// `t_hours,lat_deg,lon_deg` and an optional trailing `label` column.
/// Times are converted to seconds; the origin is the first point.
pub fn parse_track(text: &str) -> Result<Track> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let header = header.trim_end_matches('\r');
    let has_label = match header {
        "t_hours,lat_deg,lon_deg" => false,
        "t_hours,lat_deg,lon_deg,label" => true,
        other => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header `t_hours,lat_deg,lon_deg[,label]`, got `{other}`"),
            })
        }
    };
    let mut points = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        let expected = if has_label { 4 } else { 3 };
        if fields.len() != expected {
            return Err(Error::Parse {
                line,
                msg: format!("expected {expected} fields, got {}", fields.len()),
            });
        }
        let mut nums = [0.0f64; 3];
        for (k, name) in ["t_hours", "lat_deg", "lon_deg"].iter().enumerate() {
            nums[k] = fields[k].trim().parse::<f64>().map_err(|e| Error::Parse {
                line,
                msg: format!("bad {name} `{}`: {e}", fields[k]),
            })?;
            if !nums[k].is_finite() {
                return Err(Error::Parse {
                    line,
                    msg: format!("{name} is not finite"),
                });
            }
        }
        points.push(TrackPoint {
            t: nums[0] * 3600.0,
            lat: nums[1],
            lon: normalize_lon(nums[2]),
            label: if has_label {
                Some(fields[3].trim().to_string())
            } else {
                None
            },
        });
    }
    Track::from_points(points)
}

/// Write a track in the canonical CSV form: 6 decimal places, LF endings,
/// a label column only when any point carries one.
pub fn write_track(track: &Track) -> String {
    let has_label = track.points.iter().any(|p| p.label.is_some());
    let mut out = String::new();
    out.push_str(if has_label {
        "t_hours,lat_deg,lon_deg,label\n"
    } else {
        "t_hours,lat_deg,lon_deg\n"
    });
    for p in &track.points {
        if has_label {
            out.push_str(&format!(
                "{:.6},{:.6},{:.6},{}\n",
                p.t / 3600.0,
                p.lat,
                p.lon,
                p.label.as_deref().unwrap_or("")
            ));
        } else {
            out.push_str(&format!("{:.6},{:.6},{:.6}\n", p.t / 3600.0, p.lat, p.lon));
        }
    }
    out
}

/// Per-lead-time great-circle forecast errors.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ErrorTable {
    /// `(lead seconds, error meters)` rows, one per scored point.
    pub rows: Vec<(f64, f64)>,
    /// Mean error over the rows, m.
    pub mean: f64,
    /// Largest error over the rows, m.
    pub max: f64,
}

impl ErrorTable {
    /// Render as `lead_hours,error_km` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lead_hours,error_km\n");
        for (lead, err) in &self.rows {
            out.push_str(&format!("{:.3},{:.3}\n", lead / 3600.0, err / 1000.0));
        }
        out
    }
}

/// Score a forecast against a reference track sharing the same epoch:
/// every reference point inside the forecast's span is compared with the
/// time-interpolated forecast position.
pub fn evaluate_forecast(forecast: &Track, actual: &Track) -> Result<ErrorTable> {
    let (f_lo, f_hi) = forecast.time_range();
    let mut rows = Vec::new();
    for p in &actual.points {
        if p.t < f_lo || p.t > f_hi {
            continue;
        }
        let predicted = forecast
            .interpolate(p.t)
            .expect("point is inside the forecast span");
        rows.push((p.t, haversine(predicted, (p.lat, p.lon))));
    }
    if rows.is_empty() {
        return Err(Error::NoOverlap);
    }
    let mean = rows.iter().map(|r| r.1).sum::<f64>() / rows.len() as f64;
    let max = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(ErrorTable { rows, mean, max })
}

/// Serializable fit report: geographic anchors, rates in 1/s.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct FitReport {
    pub origin: ReportOrigin,
    pub b0: Option<f64>,
    pub epsilon: f64,
    pub v0: Option<[f64; 2]>,
    pub mn: Option<[f64; 2]>,
    pub accepted: bool,
    pub b01: Option<f64>,
    pub b02: Option<f64>,
    pub window: Vec<ReportAnchor>,
    pub condition_number: Option<f64>,
}

/// Geographic origin of the fit's tangent plane.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ReportOrigin {
    pub lat: f64,
    pub lon: f64,
}

/// One window anchor in geographic coordinates.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ReportAnchor {
    pub t_hours: f64,
    pub lat: f64,
    pub lon: f64,
}

impl FitReport {
    /// Assemble the report for a fit whose window lives in the tangent
    /// plane at `origin`.
    pub fn new(fit: &FitResult, origin: (f64, f64)) -> Result<Self> {
        let window = fit
            .window
            .iter()
            .map(|p| {
                let (lat, lon) = unproject(p.pos, origin)?;
                Ok(ReportAnchor {
                    t_hours: p.t / 3600.0,
                    lat,
                    lon,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            origin: ReportOrigin {
                lat: origin.0,
                lon: origin.1,
            },
            b0: fit.b0,
            epsilon: fit.epsilon_used,
            v0: fit.v0,
            mn: fit.mn,
            accepted: fit.accepted,
            b01: fit.b01,
            b02: fit.b02,
            window,
            condition_number: fit.condition_number,
        })
    }
}

/// Convert a plane-track forecast into a geographic track.
pub fn plane_to_track(points: &[PlanePoint], origin: (f64, f64)) -> Result<Track> {
    let rows = points
        .iter()
        .map(|p| {
            let (lat, lon) = unproject(p.pos, origin)?;
            Ok(TrackPoint {
                t: p.t,
                lat,
                lon,
                label: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Track::from_points(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn projection_reference_values() {
        let origin = (20.0, 130.0);
        assert_eq!(project(origin, origin).unwrap(), [0.0, 0.0]);
        let north = project((21.0, 130.0), origin).unwrap();
        assert!((north[0]).abs() < 1e-9);
        assert!((north[1] - 111_194.9).abs() < 1.0);
        let east = project((60.0, 131.0), (60.0, 130.0)).unwrap();
        assert!((east[0] - 55_597.5).abs() < 1.0);
        assert!(east[1].abs() < 1e-9);
    }

    #[test]
    fn unproject_rejects_out_of_plane_points() {
        let err = unproject([0.0, 2.0e7], (45.0, 0.0));
        assert!(matches!(err, Err(Error::OutOfPlane(_))));
    }

    #[test]
    fn haversine_reference_values() {
        assert_eq!(haversine((10.0, 20.0), (10.0, 20.0)), 0.0);
        let antipodal = haversine((0.0, 0.0), (0.0, 180.0));
        assert!((antipodal - std::f64::consts::PI * EARTH_RADIUS).abs() < 1.0);
        let one_degree = haversine((0.0, 0.0), (0.0, 1.0));
        assert!((one_degree - 111_194.9).abs() < 1.0);
    }

    #[test]
    fn parse_and_validation_errors_carry_line_numbers() {
        assert!(parse_track("t_hours,lat_deg,lon_deg\n0,20,130\n3,20.5,130.5\n").is_ok());
        let bad_lat = parse_track("t_hours,lat_deg,lon_deg\n0,91,130\n");
        assert!(
            matches!(bad_lat, Err(Error::InvalidTrack { line: 2, .. })),
            "{bad_lat:?}"
        );
        let out_of_order = parse_track("t_hours,lat_deg,lon_deg\n0,20,130\n3,21,130\n2,22,130\n");
        assert!(
            matches!(out_of_order, Err(Error::InvalidTrack { line: 4, .. })),
            "{out_of_order:?}"
        );
        let garbled = parse_track("t_hours,lat_deg,lon_deg\n0,20,abc\n");
        assert!(matches!(garbled, Err(Error::Parse { line: 2, .. })));
        let bad_header = parse_track("time,lat,lon\n0,20,130\n");
        assert!(matches!(bad_header, Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn labels_survive_a_round_trip() {
        let text = "t_hours,lat_deg,lon_deg,label\n0.000000,20.000000,130.000000,a\n3.000000,20.500000,130.500000,b\n";
        let track = parse_track(text).unwrap();
        assert_eq!(track.points[1].label.as_deref(), Some("b"));
        assert_eq!(write_track(&track), text);
    }

    #[test]
    fn canonical_files_round_trip_bit_exactly() {
        let canonical = "t_hours,lat_deg,lon_deg\n0.000000,21.500000,134.250000\n3.000000,21.750000,134.000000\n6.000000,22.000000,133.750000\n";
        let track = parse_track(canonical).unwrap();
        assert_eq!(write_track(&track), canonical);
    }

    #[test]
    fn forecast_scoring_reference_cases() {
        let actual = Track::new(vec![
            (0.0, 0.0, 0.0),
            (3.0 * 3600.0, 0.0, 1.0),
            (6.0 * 3600.0, 0.0, 2.0),
        ])
        .unwrap();
        // Identical tracks score zero everywhere.
        let table = evaluate_forecast(&actual, &actual).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert_eq!(table.max, 0.0);
        // A uniform one-degree eastward shift at the equator.
        let shifted = Track::new(vec![
            (0.0, 0.0, 1.0),
            (3.0 * 3600.0, 0.0, 2.0),
            (6.0 * 3600.0, 0.0, 3.0),
        ])
        .unwrap();
        let table = evaluate_forecast(&shifted, &actual).unwrap();
        for (_, err) in &table.rows {
            assert!((err - 111_194.9).abs() < 2.0);
        }
        // Single overlapping point.
        let stub = Track::new(vec![(6.0 * 3600.0, 0.0, 2.0), (7.0 * 3600.0, 0.0, 2.2)]).unwrap();
        let table = evaluate_forecast(&stub, &actual).unwrap();
        assert_eq!(table.rows.len(), 1);
        // Disjoint spans are an error.
        let later = Track::new(vec![(30.0 * 3600.0, 0.0, 2.0), (33.0 * 3600.0, 0.0, 2.2)]).unwrap();
        assert!(matches!(
            evaluate_forecast(&later, &actual),
            Err(Error::NoOverlap)
        ));
    }

    #[test]
    fn error_table_csv_shape() {
        let table = ErrorTable {
            rows: vec![(3600.0, 1500.0), (7200.0, 2500.0)],
            mean: 2000.0,
            max: 2500.0,
        };
        assert_eq!(
            table.to_csv(),
            "lead_hours,error_km\n1.000,1.500\n2.000,2.500\n"
        );
    }

    proptest! {
        #[test]
        fn project_unproject_round_trip(
            lat0 in -60f64..60.0,
            lon0 in -179f64..179.0,
            dx in -2e6f64..2e6,
            dy in -2e6f64..2e6,
        ) {
            let origin = (lat0, lon0);
            prop_assume!((lat0 + (dy / EARTH_RADIUS).to_degrees()).abs() <= 89.9);
            let geo = unproject([dx, dy], origin).unwrap();
            let xy = project(geo, origin).unwrap();
            prop_assert!((xy[0] - dx).abs() < 1e-6);
            prop_assert!((xy[1] - dy).abs() < 1e-6);
            let back = unproject(xy, origin).unwrap();
            prop_assert!((back.0 - geo.0).abs() < 1e-9);
            prop_assert!((back.1 - geo.1).abs() < 1e-9);
        }

        #[test]
        fn haversine_is_a_metric_on_samples(
            lat1 in -80f64..80.0, lon1 in -180f64..180.0,
            lat2 in -80f64..80.0, lon2 in -180f64..180.0,
            lat3 in -80f64..80.0, lon3 in -180f64..180.0,
        ) {
            let (p, q, r) = ((lat1, lon1), (lat2, lon2), (lat3, lon3));
            let dpq = haversine(p, q);
            prop_assert!(dpq >= 0.0);
            prop_assert_eq!(dpq, haversine(q, p));
            prop_assert!(haversine(p, r) <= dpq + haversine(q, r) + 1e-6);
            prop_assert!(haversine(p, p) == 0.0);
        }
    }
}
