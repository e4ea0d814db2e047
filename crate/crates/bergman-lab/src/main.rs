fn main() {
    let (vals, _) = bergman_lab::bergman::probe_eigen();
    println!("{vals:?}");
}
