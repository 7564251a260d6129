fn main() {
    // Debian-style systems ship the CBLAS interface inside libopenblas
    // rather than a standalone libcblas; link it so ndarray's BLAS-backed
    // routines resolve.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
