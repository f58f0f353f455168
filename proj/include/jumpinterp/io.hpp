#pragma once

// JSON and CSV readers/writers for the data types of the library. Every
// reader throws ParseError naming the offending field or line.
//
//  TimeSeries      {labels?, values: [[..], ..] | [..], norm?: {m, s}}
//                  CSV: one row per index, columns = coordinates
//  SampledProcess  {space: {ids?, weights}, labels?, values: atom -> list of
//                  m-tuples (or scalars), norm?}
//  Martingale      {partitions: time -> list of blocks (atom-index lists),
//                  values: terminal m-tuple per atom, weights, norm?,
//                  process?: time -> atom -> m-tuple (used instead of values)}
//  Matrix          {entries: rows, weights?} or a bare list of rows;
//                  CSV: one row per line

#include <iosfwd>
#include <string>
#include <vector>

#include "jumpinterp/markov.hpp"
#include "jumpinterp/martingale.hpp"
#include "jumpinterp/measure.hpp"
#include "jumpinterp/report.hpp"

namespace jumpinterp {

json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

BNorm bnorm_from_json(const json& j, std::size_t m_default);
json to_json(const BNorm& n);

TimeSeries time_series_from_json(const json& j);
json to_json(const TimeSeries& ts);
// Rows of numbers separated by commas (or whitespace); '#' starts a comment.
// A first row that does not parse as numbers is taken as a header.
TimeSeries time_series_from_csv(const std::string& text, double s = 2.0);

SampledProcess sampled_process_from_json(const json& j);
json to_json(const SampledProcess& f);

FiniteMartingale martingale_from_json(const json& j);
json to_json(const FiniteMartingale& m);

DoublyStochasticMatrix matrix_from_json(const json& j);
DoublyStochasticMatrix matrix_from_csv(const std::string& text,
                                       std::vector<double> weights = {});
json to_json(const DoublyStochasticMatrix& Q);

// Numeric rows of a CSV text (shared by the readers above).
std::vector<std::vector<double>> parse_csv_rows(const std::string& text);

}  // namespace jumpinterp
