fn main() {
    println!("ctl");
}
