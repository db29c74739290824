namespace semb {
}
