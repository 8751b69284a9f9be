#pragma once

namespace latticeforge {

// Upper incomplete gamma function Gamma(s, x) for s > 0, x >= 0.
double upper_incomplete_gamma(double s, double x);
// log Gamma(s, x); finite even where Gamma(s, x) underflows.
double log_upper_incomplete_gamma(double s, double x);

// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

// Compensated (Neumaier) summation.
class KahanSum {
  public:
    void add(double v) {
        double t = sum_ + v;
        if ((sum_ >= 0 ? sum_ : -sum_) >= (v >= 0 ? v : -v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0, comp_ = 0.0;
};

}  // namespace latticeforge
