fn main() {
    // OpenBLAS ships BLAS, CBLAS and LAPACK in one shared object.
    println!("cargo:rustc-link-lib=openblas");
}
