#include "rom/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "rom/errors.hpp"

namespace rom {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delim = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view field, const std::string& context) {
  double value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw SchemaError(context + ": cannot parse number '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw SchemaError(context + ": non-finite value '" + std::string(field) + "'");
  }
  return value;
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw SchemaError("cannot format number");
  return std::string(buf.data(), ptr);
}

std::string read_line(std::istream& in, bool& ok) {
  std::string line;
  ok = static_cast<bool>(std::getline(in, line));
  if (ok && !line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// Overlap area of two circles with radii r1, r2 and center distance d.
double lens_area(double r1, double r2, double d) {
  if (d >= r1 + r2) return 0.0;
  if (d <= std::abs(r1 - r2)) {
    const double r = std::min(r1, r2);
    return std::numbers::pi * r * r;
  }
  const double t1 = std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0);
  const double t2 = std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0);
  const double radicand =
      std::max((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2), 0.0);
  return r1 * r1 * std::acos(t1) + r2 * r2 * std::acos(t2) - 0.5 * std::sqrt(radicand);
}

void bounding_box(const ShapeSpec& spec, Eigen::Vector2d& lo, Eigen::Vector2d& hi) {
  switch (spec.kind) {
    case ShapeKind::disk:
    case ShapeKind::crescent:
      lo = spec.center.array() - spec.a;
      hi = spec.center.array() + spec.a;
      break;
    case ShapeKind::ellipse:
      lo = spec.center - Eigen::Vector2d(spec.a, spec.b);
      hi = spec.center + Eigen::Vector2d(spec.a, spec.b);
      break;
    case ShapeKind::annulus_sector:
      lo = spec.center.array() - spec.b;
      hi = spec.center.array() + spec.b;
      break;
  }
}

}  // namespace

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::clinical: return "clinical";
    case Provenance::exploration: return "exploration";
    case Provenance::test: return "test";
  }
  return "?";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "clinical") return Provenance::clinical;
  if (s == "exploration") return Provenance::exploration;
  if (s == "test") return Provenance::test;
  throw SchemaError("unknown provenance tag '" + s + "'");
}

void RomDataset::append(const Eigen::MatrixXd& rows, Provenance p) {
  if (rows.rows() == 0) return;
  if (!rows.allFinite()) throw SchemaError("dataset rows contain non-finite values");
  if (sample_count() == 0) {
    samples = rows;
  } else {
    if (rows.cols() != samples.cols()) {
      throw SchemaError("dataset append: expected " + std::to_string(samples.cols()) +
                        " columns, got " + std::to_string(rows.cols()));
    }
    const Eigen::Index old_rows = samples.rows();
    samples.conservativeResize(old_rows + rows.rows(), Eigen::NoChange);
    samples.bottomRows(rows.rows()) = rows;
  }
  samples.bottomRows(rows.rows()) =
      samples.bottomRows(rows.rows()).unaryExpr([](double v) { return wrap_degrees(v); });
  provenance.insert(provenance.end(), static_cast<std::size_t>(rows.rows()), p);
}

RomDataset assemble(const RomDataset& clinical, const RomDataset& exploration) {
  clinical.validate();
  exploration.validate();
  if (clinical.sample_count() > 0 && exploration.sample_count() > 0 &&
      clinical.dimension() != exploration.dimension()) {
    throw SchemaError("cannot assemble datasets with " + std::to_string(clinical.dimension()) +
                      " and " + std::to_string(exploration.dimension()) + " columns");
  }
  RomDataset out;
  out.subject = clinical.subject.empty() ? exploration.subject : clinical.subject;
  out.arm = clinical.sample_count() > 0 ? clinical.arm : exploration.arm;
  out.dof_indices = clinical.dof_indices.empty() ? exploration.dof_indices : clinical.dof_indices;
  out.append(clinical.samples, Provenance::clinical);
  out.append(exploration.samples, Provenance::exploration);
  return out;
}

Eigen::MatrixXd RomDataset::by_provenance(Provenance p) const {
  validate();
  std::vector<int> keep;
  for (int i = 0; i < sample_count(); ++i) {
    if (provenance[static_cast<std::size_t>(i)] == p) keep.push_back(i);
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(keep.size()), samples.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = samples.row(keep[i]);
  return out;
}

Eigen::MatrixXd RomDataset::training_samples() const {
  validate();
  std::vector<int> keep;
  for (int i = 0; i < sample_count(); ++i) {
    const Provenance p = provenance[static_cast<std::size_t>(i)];
    if (p == Provenance::clinical || p == Provenance::exploration) keep.push_back(i);
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(keep.size()), samples.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = samples.row(keep[i]);
  return out;
}

RomDataset RomDataset::select_columns(const std::vector<int>& cols) const {
  validate();
  RomDataset out;
  out.subject = subject;
  out.arm = arm;
  out.provenance = provenance;
  out.samples.resize(samples.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c] < 0 || cols[c] >= dimension()) {
      throw SchemaError("column index " + std::to_string(cols[c]) + " out of range");
    }
    out.samples.col(static_cast<Eigen::Index>(c)) = samples.col(cols[c]);
    if (!dof_indices.empty()) out.dof_indices.push_back(dof_indices[static_cast<std::size_t>(cols[c])]);
  }
  return out;
}

void RomDataset::validate() const {
  if (provenance.size() != static_cast<std::size_t>(samples.rows())) {
    throw SchemaError("dataset has " + std::to_string(samples.rows()) + " rows but " +
                      std::to_string(provenance.size()) + " provenance tags");
  }
  if (!samples.allFinite()) throw SchemaError("dataset contains non-finite values");
  if (!dof_indices.empty() && dof_indices.size() != static_cast<std::size_t>(samples.cols())) {
    throw SchemaError("dof_indices length does not match column count");
  }
}

std::vector<DofRange> dof_ranges(const Eigen::MatrixXd& samples) {
  if (samples.rows() == 0) throw SchemaError("cannot compute ranges of an empty dataset");
  std::vector<DofRange> out(static_cast<std::size_t>(samples.cols()));
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    out[static_cast<std::size_t>(c)] = {samples.col(c).minCoeff(), samples.col(c).maxCoeff(),
                                        samples.col(c).mean()};
  }
  return out;
}

std::vector<int> subsample_indices(const Eigen::MatrixXd& samples, int target, SubsampleMethod method) {
  const int m = static_cast<int>(samples.rows());
  if (target < 2) throw SchemaError("subsample target must be at least 2");
  if (target >= m) {
    std::vector<int> all(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = i;
    return all;
  }
  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(target));
  if (method == SubsampleMethod::stride) {
    for (int i = 0; i < target; ++i) {
      keep.push_back(static_cast<int>(static_cast<std::int64_t>(i) * m / target));
    }
    return keep;
  }
  // Greedy farthest-point: track each row's distance to the chosen set.
  Eigen::VectorXd dist = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
  int current = 0;
  keep.push_back(current);
  for (int k = 1; k < target; ++k) {
    for (int i = 0; i < m; ++i) {
      const double d = (samples.row(i) - samples.row(current)).squaredNorm();
      if (d < dist[i]) dist[i] = d;
    }
    dist[current] = -1.0;
    int best = -1;
    double best_d = -1.0;
    for (int i = 0; i < m; ++i) {
      if (dist[i] > best_d) {
        best_d = dist[i];
        best = i;
      }
    }
    current = best;
    keep.push_back(current);
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

Eigen::MatrixXd subsample(const Eigen::MatrixXd& samples, int target, SubsampleMethod method) {
  const std::vector<int> keep = subsample_indices(samples, target, method);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(keep.size()), samples.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = samples.row(keep[i]);
  return out;
}

void validate_shape(const ShapeSpec& spec) {
  switch (spec.kind) {
    case ShapeKind::disk:
      if (spec.a <= 0.0) throw std::invalid_argument("disk radius must be positive");
      break;
    case ShapeKind::ellipse:
      if (spec.a <= 0.0 || spec.b <= 0.0) throw std::invalid_argument("ellipse semi-axes must be positive");
      break;
    case ShapeKind::annulus_sector:
      if (spec.a < 0.0 || spec.b <= spec.a) throw std::invalid_argument("annulus sector needs 0 <= inner < outer radius");
      if (spec.theta1 <= spec.theta0 || spec.theta1 - spec.theta0 > 360.0) {
        throw std::invalid_argument("annulus sector needs theta0 < theta1 <= theta0 + 360");
      }
      break;
    case ShapeKind::crescent:
      if (spec.a <= 0.0 || spec.b <= 0.0) throw std::invalid_argument("crescent radii must be positive");
      if (spec.d <= std::abs(spec.a - spec.b) || spec.d >= spec.a + spec.b) {
        throw std::invalid_argument("crescent needs |a - b| < d < a + b");
      }
      break;
  }
}

double shape_area(const ShapeSpec& spec) {
  validate_shape(spec);
  switch (spec.kind) {
    case ShapeKind::disk:
      return std::numbers::pi * spec.a * spec.a;
    case ShapeKind::ellipse:
      return std::numbers::pi * spec.a * spec.b;
    case ShapeKind::annulus_sector: {
      const double span_rad = (spec.theta1 - spec.theta0) * std::numbers::pi / 180.0;
      return 0.5 * span_rad * (spec.b * spec.b - spec.a * spec.a);
    }
    case ShapeKind::crescent:
      return std::numbers::pi * spec.a * spec.a - lens_area(spec.a, spec.b, spec.d);
  }
  throw std::invalid_argument("unknown shape kind");
}

bool shape_contains(const ShapeSpec& spec, const Eigen::Vector2d& point) {
  const Eigen::Vector2d p = point - spec.center;
  switch (spec.kind) {
    case ShapeKind::disk:
      return p.squaredNorm() <= spec.a * spec.a;
    case ShapeKind::ellipse: {
      const double u = p.x() / spec.a;
      const double v = p.y() / spec.b;
      return u * u + v * v <= 1.0;
    }
    case ShapeKind::annulus_sector: {
      const double r2 = p.squaredNorm();
      if (r2 < spec.a * spec.a || r2 > spec.b * spec.b) return false;
      const double theta = std::atan2(p.y(), p.x()) * 180.0 / std::numbers::pi;
      const double rel = std::fmod(theta - spec.theta0 + 720.0, 360.0);
      return rel <= spec.theta1 - spec.theta0;
    }
    case ShapeKind::crescent: {
      if (p.squaredNorm() > spec.a * spec.a) return false;
      const Eigen::Vector2d q = p - Eigen::Vector2d(spec.d, 0.0);
      return q.squaredNorm() > spec.b * spec.b;
    }
  }
  return false;
}

Eigen::MatrixXd sample_shape(const ShapeSpec& spec, int count, std::uint64_t seed) {
  validate_shape(spec);
  if (count < 50) throw std::invalid_argument("shape sampling needs at least 50 points");
  Eigen::Vector2d lo, hi;
  bounding_box(spec, lo, hi);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x());
  std::uniform_real_distribution<double> uy(lo.y(), hi.y());
  Eigen::MatrixXd out(count, 2);
  const std::int64_t max_attempts = 10000LL * count + 10000LL;
  std::int64_t attempts = 0;
  int accepted = 0;
  while (accepted < count) {
    if (++attempts > max_attempts) {
      throw std::runtime_error("shape rejection sampling exceeded the attempt budget");
    }
    const Eigen::Vector2d p(ux(rng), uy(rng));
    if (shape_contains(spec, p)) {
      out.row(accepted++) = p.transpose();
    }
  }
  return out;
}

std::vector<SkeletonFrame> load_frames_csv(const std::string& path,
                                           const std::vector<std::string>& required_bones) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open frames CSV: " + path);

  bool ok = false;
  const std::string header = read_line(in, ok);
  if (!ok) throw SchemaError(path + ": empty file");
  const auto fields = split_fields(header);
  if (fields.empty() || fields[0] != "timestamp") {
    throw SchemaError(path + ": first column must be 'timestamp'");
  }
  if ((fields.size() - 1) % 7 != 0) {
    throw SchemaError(path + ": expected seven columns per bone after 'timestamp', got " +
                      std::to_string(fields.size() - 1));
  }
  static const std::array<const char*, 7> suffixes = {".qw", ".qx", ".qy", ".qz", ".px", ".py", ".pz"};
  std::vector<std::string> bones;
  for (std::size_t g = 1; g < fields.size(); g += 7) {
    const std::string_view first = fields[g];
    if (first.size() <= 3 || first.substr(first.size() - 3) != ".qw") {
      throw SchemaError(path + ": expected a '<bone>.qw' column, got '" + std::string(first) + "'");
    }
    const std::string bone(first.substr(0, first.size() - 3));
    for (std::size_t k = 0; k < 7; ++k) {
      const std::string expected = bone + suffixes[k];
      if (fields[g + k] != expected) {
        throw SchemaError(path + ": expected column '" + expected + "', got '" +
                          std::string(fields[g + k]) + "'");
      }
    }
    bones.push_back(bone);
  }
  for (const auto& need : required_bones) {
    if (std::find(bones.begin(), bones.end(), need) == bones.end()) {
      throw SchemaError(path + ": required bone '" + need + "' not present");
    }
  }

  std::vector<SkeletonFrame> frames;
  std::size_t line_no = 1;
  double prev_ts = -std::numeric_limits<double>::infinity();
  while (true) {
    const std::string line = read_line(in, ok);
    if (!ok) break;
    ++line_no;
    if (line.empty()) continue;
    const auto row = split_fields(line);
    if (row.size() != fields.size()) {
      throw SchemaError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(fields.size()) + " fields, got " + std::to_string(row.size()));
    }
    const std::string ctx = path + ":" + std::to_string(line_no);
    SkeletonFrame frame;
    frame.timestamp = parse_double(row[0], ctx);
    if (!(frame.timestamp > prev_ts)) {
      throw SchemaError(ctx + ": timestamps must be strictly increasing");
    }
    prev_ts = frame.timestamp;
    for (std::size_t b = 0; b < bones.size(); ++b) {
      const std::size_t base = 1 + 7 * b;
      BonePose pose;
      pose.orientation = {parse_double(row[base + 0], ctx), parse_double(row[base + 1], ctx),
                          parse_double(row[base + 2], ctx), parse_double(row[base + 3], ctx)};
      pose.position = {parse_double(row[base + 4], ctx), parse_double(row[base + 5], ctx),
                       parse_double(row[base + 6], ctx)};
      frame.bones[bones[b]] = pose;
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

void save_frames_csv(const std::string& path, const std::vector<SkeletonFrame>& frames,
                     const std::vector<std::string>& bones) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot open for writing: " + path);
  out << "timestamp";
  for (const auto& b : bones) {
    for (const char* s : {".qw", ".qx", ".qy", ".qz", ".px", ".py", ".pz"}) out << ',' << b << s;
  }
  out << '\n';
  for (const auto& f : frames) {
    out << format_double(f.timestamp);
    for (const auto& b : bones) {
      const auto it = f.bones.find(b);
      if (it == f.bones.end()) throw SchemaError("frame lacks bone '" + b + "'");
      const BonePose& p = it->second;
      out << ',' << format_double(p.orientation.w) << ',' << format_double(p.orientation.x) << ','
          << format_double(p.orientation.y) << ',' << format_double(p.orientation.z) << ','
          << format_double(p.position.x()) << ',' << format_double(p.position.y()) << ','
          << format_double(p.position.z());
    }
    out << '\n';
  }
}

AngleTrack extract_angle_track(const std::vector<SkeletonFrame>& frames, const KinematicChain& chain) {
  chain.validate();
  AngleTrack track;
  const int m = static_cast<int>(frames.size());
  track.angles.resize(m, kArmDofCount);
  track.timestamps.resize(static_cast<std::size_t>(m));
  track.gimbal.assign(static_cast<std::size_t>(m), false);
  if (m == 0) return track;

  std::vector<SkeletonFrame> aligned = frames;
  for (const std::string* bone : {&chain.chest, &chain.upper_arm, &chain.forearm, &chain.hand}) {
    std::vector<Quaternion> qs;
    qs.reserve(static_cast<std::size_t>(m));
    for (const auto& f : frames) {
      const auto it = f.bones.find(*bone);
      if (it == f.bones.end()) throw SchemaError("bone '" + *bone + "' missing from frame");
      qs.push_back(it->second.orientation);
    }
    qs = hemisphere_align(qs);
    for (int i = 0; i < m; ++i) aligned[static_cast<std::size_t>(i)].bones[*bone].orientation = qs[static_cast<std::size_t>(i)];
  }

  ExtractionState state;
  for (int i = 0; i < m; ++i) {
    const auto& frame = aligned[static_cast<std::size_t>(i)];
    track.timestamps[static_cast<std::size_t>(i)] = frame.timestamp;
    const JointAngles ja = extract_joint_angles(frame, chain, &state);
    track.angles.row(i) = ja.q.transpose();
    bool any = false;
    for (const bool g : ja.gimbal) any = any || g;
    track.gimbal[static_cast<std::size_t>(i)] = any;
  }
  return track;
}

void save_angles_csv(const std::string& path, const AngleTrack& track) {
  const Eigen::Index m = track.angles.rows();
  if (track.timestamps.size() != static_cast<std::size_t>(m)) {
    throw SchemaError("angle track has " + std::to_string(m) + " rows but " +
                      std::to_string(track.timestamps.size()) + " timestamps");
  }
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot open for writing: " + path);
  out << "timestamp";
  for (Eigen::Index c = 0; c < track.angles.cols(); ++c) out << ",q" << (c + 1);
  out << ",gimbal\n";
  for (Eigen::Index i = 0; i < m; ++i) {
    out << format_double(track.timestamps[static_cast<std::size_t>(i)]);
    for (Eigen::Index c = 0; c < track.angles.cols(); ++c) out << ',' << format_double(track.angles(i, c));
    const bool g = i < static_cast<Eigen::Index>(track.gimbal.size()) &&
                   track.gimbal[static_cast<std::size_t>(i)];
    out << ',' << (g ? '1' : '0') << '\n';
  }
}

AngleTrack load_angles_csv(const std::string& path, int expected_dims) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open angles CSV: " + path);
  bool ok = false;
  const std::string header = read_line(in, ok);
  if (!ok) throw SchemaError(path + ": empty file");
  const auto fields = split_fields(header);
  if (fields.empty() || fields[0] != "timestamp") {
    throw SchemaError(path + ": first column must be 'timestamp'");
  }
  bool has_gimbal = false;
  std::size_t ncols = fields.size() - 1;
  if (ncols > 0 && fields.back() == "gimbal") {
    has_gimbal = true;
    --ncols;
  }
  if (ncols == 0) throw SchemaError(path + ": no angle columns");
  for (std::size_t c = 0; c < ncols; ++c) {
    const std::string expected = "q" + std::to_string(c + 1);
    if (fields[1 + c] != expected) {
      throw SchemaError(path + ": expected column '" + expected + "', got '" +
                        std::string(fields[1 + c]) + "'");
    }
  }
  if (expected_dims >= 0 && static_cast<int>(ncols) != expected_dims) {
    throw SchemaError(path + ": expected " + std::to_string(expected_dims) + " angle columns, got " +
                      std::to_string(ncols));
  }

  std::vector<double> ts;
  std::vector<double> values;
  std::vector<bool> gimbal;
  std::size_t line_no = 1;
  double prev_ts = -std::numeric_limits<double>::infinity();
  while (true) {
    const std::string line = read_line(in, ok);
    if (!ok) break;
    ++line_no;
    if (line.empty()) continue;
    const auto row = split_fields(line);
    if (row.size() != fields.size()) {
      throw SchemaError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(fields.size()) + " fields, got " + std::to_string(row.size()));
    }
    const std::string ctx = path + ":" + std::to_string(line_no);
    const double t = parse_double(row[0], ctx);
    if (!(t > prev_ts)) throw SchemaError(ctx + ": timestamps must be strictly increasing");
    prev_ts = t;
    ts.push_back(t);
    for (std::size_t c = 0; c < ncols; ++c) values.push_back(parse_double(row[1 + c], ctx));
    if (has_gimbal) {
      const std::string_view g = row.back();
      if (g == "0") {
        gimbal.push_back(false);
      } else if (g == "1") {
        gimbal.push_back(true);
      } else {
        throw SchemaError(ctx + ": gimbal flag must be 0 or 1, got '" + std::string(g) + "'");
      }
    } else {
      gimbal.push_back(false);
    }
  }

  AngleTrack track;
  track.timestamps = std::move(ts);
  track.gimbal = std::move(gimbal);
  const Eigen::Index m = static_cast<Eigen::Index>(track.timestamps.size());
  track.angles.resize(m, static_cast<Eigen::Index>(ncols));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index c = 0; c < track.angles.cols(); ++c) {
      track.angles(i, c) = values[static_cast<std::size_t>(i) * ncols + static_cast<std::size_t>(c)];
    }
  }
  return track;
}

std::string DatasetManifest::to_json() const {
  nlohmann::json j;
  j["subject"] = subject;
  j["arm"] = arm;
  j["dof_names"] = dof_names;
  j["counts"] = counts;
  j["sources"] = sources;
  return j.dump(2);
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("dataset manifest: ") + e.what());
  }
  DatasetManifest m;
  try {
    m.subject = j.at("subject").get<std::string>();
    m.arm = j.at("arm").get<std::string>();
    m.dof_names = j.at("dof_names").get<std::vector<std::string>>();
    m.counts = j.at("counts").get<std::map<std::string, int>>();
    m.sources = j.at("sources").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("dataset manifest: ") + e.what());
  }
  return m;
}

}  // namespace rom
