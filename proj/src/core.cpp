#include "nasp/core.hpp"
#include "nasp/polyhedron.hpp"

#include <algorithm>

namespace nasp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::EncodingLengthMismatch: return "EncodingLengthMismatch";
    case ErrorCode::TooManyComplementarities: return "TooManyComplementarities";
    case ErrorCode::EmptyPieceList: return "EmptyPieceList";
    case ErrorCode::NonPsdObjective: return "NonPsdObjective";
    case ErrorCode::DegenerateWeight: return "DegenerateWeight";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ProfileMismatch: return "ProfileMismatch";
    case ErrorCode::TimeLimit: return "TimeLimit";
  }
  return "Unknown";
}

Matrix vstack(const Matrix& top, const Matrix& rows) {
  if (top.rows() == 0) return rows;
  if (rows.rows() == 0) return top;
  if (top.cols() != rows.cols())
    fail(ErrorCode::DimensionMismatch, "vstack column counts differ");
  Matrix out(top.rows() + rows.rows(), top.cols());
  out << top, rows;
  return out;
}

Vector vconcat(const Vector& top, const Vector& tail) {
  Vector out(top.size() + tail.size());
  out << top, tail;
  return out;
}

void Polyhedron::validate() const {
  if (A.rows() != b.size())
    fail(ErrorCode::DimensionMismatch, "A has " + std::to_string(A.rows()) +
                                           " rows but b has " +
                                           std::to_string(b.size()));
  if (E.rows() != f.size())
    fail(ErrorCode::DimensionMismatch, "E rows and f length differ");
  if (E.rows() > 0 && E.cols() != A.cols())
    fail(ErrorCode::DimensionMismatch, "E and A column counts differ");
}

void Polyhedron::add_le(const Vector& row, double rhs) {
  if (row.size() != dim()) fail(ErrorCode::DimensionMismatch, "row length");
  A.conservativeResize(A.rows() + 1, Eigen::NoChange);
  A.row(A.rows() - 1) = row.transpose();
  b.conservativeResize(b.size() + 1);
  b(b.size() - 1) = rhs;
}

void Polyhedron::add_eq(const Vector& row, double rhs) {
  if (row.size() != dim()) fail(ErrorCode::DimensionMismatch, "row length");
  if (E.cols() != dim()) E.resize(0, dim());
  E.conservativeResize(E.rows() + 1, Eigen::NoChange);
  E.row(E.rows() - 1) = row.transpose();
  f.conservativeResize(f.size() + 1);
  f(f.size() - 1) = rhs;
}

double Polyhedron::violation(const Vector& x) const {
  if (x.size() != dim()) fail(ErrorCode::DimensionMismatch, "point dimension");
  double worst = 0.0;
  if (A.rows() > 0) worst = std::max(worst, (A * x - b).maxCoeff());
  if (E.rows() > 0) worst = std::max(worst, (E * x - f).cwiseAbs().maxCoeff());
  return worst;
}

Polyhedron Polyhedron::intersect(const Polyhedron& other) const {
  if (other.dim() != dim())
    fail(ErrorCode::DimensionMismatch, "intersect dimension");
  Polyhedron out(dim());
  out.A = vstack(A, other.A);
  out.b = vconcat(b, other.b);
  out.E = vstack(E.rows() ? E : Matrix(0, dim()), other.E.rows() ? other.E : Matrix(0, dim()));
  out.f = vconcat(f, other.f);
  if (out.A.rows() == 0) out.A.resize(0, dim());
  if (out.E.rows() == 0) out.E.resize(0, dim());
  return out;
}

}  // namespace nasp
