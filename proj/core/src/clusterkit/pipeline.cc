#include "xrouter/clusterkit/pipeline.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

#include "json.hpp"
#include "xrouter/common/checksum.h"
#include "xrouter/common/error.h"
#include "xrouter/common/rng.h"

namespace xrouter::clusterkit {

namespace {

constexpr uint64_t kSvdStream = 1;
constexpr uint64_t kKMeansStream = 2;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <typename Range>
void put_f64s(std::string& out, const Range& values) {
  for (double v : values) put_f64(out, v);
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  double f64() {
    need(8);
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  std::string_view take(size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  size_t position() const { return pos_; }

 private:
  void need(size_t n) const {
    if (pos_ + n > bytes_.size())
      throw Error(ErrorCode::kCorruptFile, "pipeline artifact truncated");
  }
  std::string_view bytes_;
  size_t pos_ = 0;
};

}  // namespace

Scaler Scaler::fit(const RowMatrix& samples) {
  Scaler s;
  const auto n = static_cast<double>(samples.rows());
  s.mean = samples.colwise().mean().transpose();
  s.scale.resize(samples.cols());
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const double var = (samples.col(j).array() - s.mean[j]).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale[j] = sd > 0.0 && std::isfinite(sd) ? sd : 1.0;
  }
  return s;
}

ClusterPipeline ClusterPipeline::fit(std::span<const std::string> documents,
                                     const FitOptions& options, FitReport* report) {
  ClusterPipeline p;
  std::vector<TokenList> tokens;
  tokens.reserve(documents.size());
  for (const auto& doc : documents) tokens.push_back(p.preprocessor_(doc));

  p.vectorizer_ = Vectorizer::fit(tokens);
  const SparseMatrix tfidf = p.vectorizer_.transform_all(tokens);
  p.projection_ = svd_fit(tfidf, options.dim, mix_seed(options.seed, kSvdStream));

  RowMatrix reduced = tfidf * p.projection_.components.transpose();
  p.scaler_ = Scaler::fit(reduced);
  for (Eigen::Index i = 0; i < reduced.rows(); ++i)
    reduced.row(i) = p.scaler_.apply(reduced.row(i).transpose()).transpose();

  KMeansResult km = kmeans_fit(reduced, options.k, mix_seed(options.seed, kKMeansStream));
  p.centroids_ = std::move(km.centroids);
  if (report != nullptr) {
    report->embeddings = std::move(reduced);
    report->assignments = std::move(km.assignments);
    report->inertia = std::move(km.inertia);
  }
  return p;
}

ClusterPipeline ClusterPipeline::assemble(Preprocessor preprocessor,
                                          Vectorizer vectorizer, Projection projection,
                                          Scaler scaler, RowMatrix centroids) {
  if (centroids.rows() < 1 || centroids.cols() != projection.dim() ||
      projection.components.cols() != static_cast<Eigen::Index>(vectorizer.size()) ||
      scaler.mean.size() != projection.dim() || scaler.scale.size() != projection.dim())
    throw Error(ErrorCode::kInvalidArgument, "pipeline parts have inconsistent shapes");
  ClusterPipeline p;
  p.preprocessor_ = std::move(preprocessor);
  p.vectorizer_ = std::move(vectorizer);
  p.projection_ = std::move(projection);
  p.scaler_ = std::move(scaler);
  p.centroids_ = std::move(centroids);
  return p;
}

Eigen::VectorXd ClusterPipeline::embed_tokens(std::span<const std::string> tokens) const {
  return scaler_.apply(projection_.project(vectorizer_.transform(tokens)));
}

Eigen::VectorXd ClusterPipeline::embed(std::string_view text) const {
  return embed_tokens(preprocessor_(text));
}

int ClusterPipeline::classify(std::string_view text) const {
  return nearest_centroid(centroids_, embed(text));
}

ClusterPipeline ClusterPipeline::with_cluster_order(std::span<const int> order) const {
  if (static_cast<Eigen::Index>(order.size()) != centroids_.rows())
    throw Error(ErrorCode::kInvalidArgument, "cluster order must list every cluster");
  ClusterPipeline out = *this;
  for (size_t j = 0; j < order.size(); ++j)
    out.centroids_.row(static_cast<Eigen::Index>(j)) = centroids_.row(order[j]);
  return out;
}

std::string ClusterPipeline::serialize() const {
  nlohmann::ordered_json header;
  header["k"] = k();
  header["dim"] = dim();
  header["vocab_size"] = vectorizer_.size();
  header["n_docs"] = vectorizer_.n_docs();
  header["checksum"] = "crc32";
  header["arrays"] = {"idf", "components", "singular_values", "mean", "scale", "centroids"};
  header["stopwords"] = preprocessor_.stopwords();
  header["vocabulary"] = vectorizer_.terms();
  const std::string header_text = header.dump();

  std::string out(kPipelineMagic);
  put_u32(out, version_);
  put_u32(out, static_cast<uint32_t>(header_text.size()));
  out += header_text;
  put_f64s(out, vectorizer_.idf());
  put_f64s(out, projection_.components.reshaped<Eigen::RowMajor>());
  put_f64s(out, projection_.singular_values);
  put_f64s(out, scaler_.mean);
  put_f64s(out, scaler_.scale);
  put_f64s(out, centroids_.reshaped<Eigen::RowMajor>());
  put_u32(out, crc32(out));
  return out;
}

ClusterPipeline ClusterPipeline::deserialize(std::string_view bytes) {
  ByteReader reader(bytes);
  if (reader.take(kPipelineMagic.size()) != kPipelineMagic)
    throw Error(ErrorCode::kCorruptFile, "bad pipeline magic");
  const uint32_t version = reader.u32();
  if (version != kPipelineFormatVersion)
    throw Error(ErrorCode::kVersionMismatch,
                "pipeline format version " + std::to_string(version) +
                    ", expected " + std::to_string(kPipelineFormatVersion));
  if (bytes.size() < reader.position() + 4)
    throw Error(ErrorCode::kCorruptFile, "pipeline artifact truncated");
  const auto body = bytes.substr(0, bytes.size() - 4);
  ByteReader tail(bytes.substr(bytes.size() - 4));
  if (crc32(body) != tail.u32())
    throw Error(ErrorCode::kCorruptFile, "pipeline checksum mismatch");

  ByteReader in(body);
  in.take(kPipelineMagic.size());
  in.u32();
  const uint32_t header_len = in.u32();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in.take(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptFile, std::string("pipeline header: ") + e.what());
  }

  ClusterPipeline p;
  p.version_ = version;
  try {
    const int k = header.at("k").get<int>();
    const int dim = header.at("dim").get<int>();
    const auto vocab = header.at("vocab_size").get<size_t>();
    const auto n_docs = header.at("n_docs").get<int64_t>();
    auto terms = header.at("vocabulary").get<std::vector<std::string>>();
    if (terms.size() != vocab || k < 1 || dim < 0)
      throw Error(ErrorCode::kCorruptFile, "inconsistent pipeline header");
    p.preprocessor_ = Preprocessor(header.at("stopwords").get<std::vector<std::string>>());

    std::vector<double> idf(vocab);
    for (auto& v : idf) v = in.f64();
    p.vectorizer_ = Vectorizer(std::move(terms), std::move(idf), n_docs);

    p.projection_.components.resize(dim, static_cast<Eigen::Index>(vocab));
    for (auto& v : p.projection_.components.reshaped<Eigen::RowMajor>()) v = in.f64();
    p.projection_.singular_values.resize(dim);
    for (auto& v : p.projection_.singular_values) v = in.f64();
    p.scaler_.mean.resize(dim);
    for (auto& v : p.scaler_.mean) v = in.f64();
    p.scaler_.scale.resize(dim);
    for (auto& v : p.scaler_.scale) v = in.f64();
    p.centroids_.resize(k, dim);
    for (auto& v : p.centroids_.reshaped<Eigen::RowMajor>()) v = in.f64();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptFile, std::string("pipeline header: ") + e.what());
  }
  if (in.position() != body.size())
    throw Error(ErrorCode::kCorruptFile, "trailing bytes in pipeline artifact");
  return p;
}

void ClusterPipeline::save(const std::string& path) const {
  const std::string bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

ClusterPipeline ClusterPipeline::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace xrouter::clusterkit
