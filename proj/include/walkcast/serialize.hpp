#ifndef WALKCAST_SERIALIZE_HPP
#define WALKCAST_SERIALIZE_HPP

#include <string>

#include "walkcast/classic_models.hpp"
#include "walkcast/lstm_models.hpp"

namespace walkcast::serialize {

inline constexpr int kModelSchemaVersion = 1;

// Versioned JSON with a family tag, the hyperparameters, flat parameter
// arrays, and a scaler snapshot. Doubles round-trip exactly, so equal
// serializations mean bit-identical models.
std::string to_json(const models::TrainedModel& model);
models::TrainedModel classic_from_json(const std::string& text);

// Same envelope with family tag "lstm1".."lstm4", an architecture
// descriptor, and per-layer tensors.
std::string to_json(const lstm::TrainedLstm& model);
lstm::TrainedLstm lstm_from_json(const std::string& text);

}  // namespace walkcast::serialize

#endif  // WALKCAST_SERIALIZE_HPP
