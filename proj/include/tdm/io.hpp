#pragma once

#include <iosfwd>
#include <string>

#include "tdm/matrix.hpp"

namespace tdm {

// Matrix files: JSON {"d": n, "entries": [[...], ...]} with row-major
// entries, or CSV with d lines of d comma-separated values. Readers parse
// into a CandidateMatrix and then validate for the requested mode.

CandidateMatrix read_matrix_json(std::istream& in);
CandidateMatrix read_matrix_csv(std::istream& in);

// Dispatches on extension (.json vs anything else -> CSV).
CandidateMatrix read_matrix_file(const std::string& path);
ValidatedMatrix read_validated_matrix(const std::string& path, Mode mode, double tol = kTol);

std::string matrix_to_json(const CandidateMatrix& m);
std::string matrix_to_csv(const CandidateMatrix& m);
void write_matrix_file(const std::string& path, const CandidateMatrix& m);

}  // namespace tdm
