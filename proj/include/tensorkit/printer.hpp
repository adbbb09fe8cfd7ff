#pragma once

#include <string>

#include "tensorkit/expr.hpp"

namespace tk {

enum class OutputFormat { Redberry, LaTeX, UTF8, WolframMathematica };

std::string printExpr(const Expr* e, OutputFormat format);
std::string printExpr(const ExprPtr& e, OutputFormat format);

}  // namespace tk
