#include <vector>

/**
 * Dense row-major matrix of double precision values.
 */
class Matrix {
public:
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    /**
     * Return the element stored at the given row and column.
     * @param r zero based row index
     * @param c zero based column index
     */
    double at(int r, int c) const {
        return data_[r * cols_ + c];
    }

    /**
     * Multiply every element of the matrix by a constant factor.
     * @param k the scale factor to apply
     */
    void scale(double k) {
        for (auto &v : data_) {
            // update each value in place
            v *= k;
        }
    }

private:
    int rows_;
    int cols_;
    std::vector<double> data_;
};

int trace_of(const Matrix &m, int n) {
    double t = 0;
    for (int i = 0; i < n; i++) t += m.at(i, i);
    return static_cast<int>(t);
}
