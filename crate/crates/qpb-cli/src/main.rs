fn main() {
    println!("qpb: scaffolding");
}
