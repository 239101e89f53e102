#pragma once

namespace fkpp {

// scaled complementary error function exp(x^2) erfc(x)
double erfcx(double x);
// log(erfc(x)), finite far beyond the underflow of erfc
double log_erfc(double x);

}  // namespace fkpp
